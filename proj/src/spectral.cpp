#include "smpflow/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "smpflow/error.hpp"

namespace smpflow {

namespace {

// Roots of c2 x^2 + c1 x + c0 with disc > 0, without cancellation.
std::pair<double, double> stable_quadratic(double c2, double c1, double c0, double disc) {
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  return {q / c2, c0 / q};
}

}  // namespace

CurveParams::CurveParams(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("curve parameters must be finite");
  if (!(a > 0.0)) throw ValidationError("a must be positive");
}

void TwoIntervalSet::validate() const {
  if (!(b0 < a1 && a1 < b1 && b1 < a0)) {
    std::ostringstream os;
    os << "endpoints must satisfy b0 < a1 < b1 < a0, got (" << b0 << ", " << a1 << ", " << b1 << ", " << a0 << ")";
    throw ValidationError(os.str());
  }
}

double TwoIntervalSet::distance(double x) const noexcept {
  if (contains(x)) return 0.0;
  if (x < b0) return b0 - x;
  if (x > a0) return x - a0;
  return std::min(x - a1, b1 - x);
}

double distance(const CurvePoint& x, const CurvePoint& y) noexcept {
  return std::hypot(x.p0 - y.p0, x.p1 - y.p1);
}

TwoIntervalSet band_endpoints(const CurveParams& params) {
  const double a = params.a();
  const double b = params.b();
  std::array<double, 4> roots{};
  // V(z) = +2 and V(z) = -2, i.e. a z^2 + (b -+ 2) z - 1 = 0; c0 = -1 keeps the discriminant positive.
  for (int s = 0; s < 2; ++s) {
    const double c1 = b + (s == 0 ? -2.0 : 2.0);
    const double disc = c1 * c1 + 4.0 * a;
    auto [r1, r2] = stable_quadratic(a, c1, -1.0, disc);
    roots[2 * s] = r1;
    roots[2 * s + 1] = r2;
  }
  std::sort(roots.begin(), roots.end());
  TwoIntervalSet e{roots[0], roots[1], roots[2], roots[3]};
  e.validate();
  return e;
}

std::complex<double> v_eval(const CurveParams& params, std::complex<double> z) {
  if (z == 0.0) throw DomainError("V(z) is undefined at z = 0");
  return params.a() * z + params.b() - 1.0 / z;
}

std::complex<double> delta_eval(const CurveParams& params, std::complex<double> z, double tol_boundary) {
  const auto v = v_eval(params, z);
  auto s = std::sqrt(v * v - 4.0);
  // Larger-modulus root first, the other one is its reciprocal.
  if (std::real(std::conj(v) * s) < 0.0) s = -s;
  const auto big = 0.5 * (v + s);
  const auto small = 1.0 / big;
  if (std::abs(small) >= 1.0 - tol_boundary) {
    std::ostringstream os;
    os << "z = " << z << " is too close to E (|Delta| = " << std::abs(small) << ")";
    throw DomainError(os.str());
  }
  return small;
}

double curve_residual(const CurveParams& params, const CurvePoint& p) noexcept {
  const double a = params.a();
  const double b = params.b();
  const double x = p.p0;
  const double y = p.p1;
  return x * x + y * y + a * a * x * x * y * y + b * x * y - 1.0 / a;
}

double curve_scale(const CurveParams& params) noexcept { return std::max(1.0, 1.0 / params.a()); }

bool on_curve(const CurveParams& params, const CurvePoint& p, double tol) noexcept {
  return std::abs(curve_residual(params, p)) <= tol * curve_scale(params);
}

void require_on_curve(const CurveParams& params, const CurvePoint& p, double tol, const char* what) {
  if (!on_curve(params, p, tol)) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (" << p.p0 << ", " << p.p1 << ") is not on the isospectral curve, residual "
       << curve_residual(params, p);
    throw ValidationError(os.str());
  }
}

namespace {

double p1_discriminant(const CurveParams& params, double p0) {
  const double a = params.a();
  const double c2 = 1.0 + a * a * p0 * p0;
  const double c1 = params.b() * p0;
  const double c0 = p0 * p0 - 1.0 / a;
  return c1 * c1 - 4.0 * c2 * c0;
}

}  // namespace

std::vector<double> curve_solve_p1(const CurveParams& params, double p0) {
  const double a = params.a();
  const double c2 = 1.0 + a * a * p0 * p0;
  const double c1 = params.b() * p0;
  const double c0 = p0 * p0 - 1.0 / a;
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-c1 / (2.0 * c2)};
  double r1 = 0.0;
  double r2 = 0.0;
  if (c1 == 0.0) {
    r1 = std::sqrt(disc) / (2.0 * c2);
    r2 = -r1;
  } else {
    std::tie(r1, r2) = stable_quadratic(c2, c1, c0, disc);
  }
  if (r1 < r2) std::swap(r1, r2);
  return {r1, r2};
}

double feasible_p0_bound(const CurveParams& params) {
  double lo = 0.0;
  double hi = 1.0;
  while (p1_discriminant(params, hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (p1_discriminant(params, mid) >= 0.0) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace smpflow
