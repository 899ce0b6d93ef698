#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "smpflow/options.hpp"

namespace smpflow {

/// Coefficients of V(z) = a z + b - 1/z. The spectral set is E = V^{-1}([-2, 2]).
class CurveParams {
 public:
  CurveParams(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  friend bool operator==(const CurveParams&, const CurveParams&) = default;

 private:
  double a_;
  double b_;
};

/// E = [b0, a0] \ (a1, b1) with b0 < a1 < 0 < b1 < a0.
struct TwoIntervalSet {
  double b0;
  double a1;
  double b1;
  double a0;

  /// Throws ValidationError unless the endpoints are strictly ordered.
  void validate() const;
  double diameter() const noexcept { return a0 - b0; }
  bool contains(double x) const noexcept { return (x >= b0 && x <= a1) || (x >= b1 && x <= a0); }
  /// Distance from a real point to E.
  double distance(double x) const noexcept;
};

/// Coordinates (p0, p1) of a period-two SMP matrix.
struct CurvePoint {
  double p0 = 0.0;
  double p1 = 0.0;

  CurvePoint operator-() const noexcept { return {-p0, -p1}; }
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

double distance(const CurvePoint& x, const CurvePoint& y) noexcept;

TwoIntervalSet band_endpoints(const CurveParams& params);

std::complex<double> v_eval(const CurveParams& params, std::complex<double> z);

/// The root of w^2 - V(z) w + 1 = 0 inside the unit disk. Raises DomainError
/// if |Delta| >= 1 - tol_boundary, i.e. z is on or too close to E.
std::complex<double> delta_eval(const CurveParams& params, std::complex<double> z,
                                double tol_boundary = 1e-9);

/// Signed residual p0^2 + p1^2 + a^2 p0^2 p1^2 + b p0 p1 - 1/a.
double curve_residual(const CurveParams& params, const CurvePoint& p) noexcept;

/// Scale used for the relative curve tolerance, max(1, 1/a).
double curve_scale(const CurveParams& params) noexcept;

bool on_curve(const CurveParams& params, const CurvePoint& p, double tol) noexcept;

/// Throws ValidationError with the residual in the message if p is off the curve.
void require_on_curve(const CurveParams& params, const CurvePoint& p, double tol, const char* what);

/// Real roots p1 of the curve equation for a given p0, in decreasing order.
std::vector<double> curve_solve_p1(const CurveParams& params, double p0);

/// Largest |p0| for which curve_solve_p1 has real roots (bisection on the discriminant).
double feasible_p0_bound(const CurveParams& params);

}  // namespace smpflow
