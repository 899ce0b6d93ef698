#pragma once

#include <array>
#include <vector>

#include "smpflow/options.hpp"
#include "smpflow/smp_operator.hpp"
#include "smpflow/spectral.hpp"

namespace smpflow {

/// [[p, r], [r, -p]] / sqrt(p^2 + r^2): symmetric, orthogonal, determinant -1.
struct UBlock {
  std::array<double, 4> m;  // row major
  double operator()(int i, int j) const noexcept { return m[static_cast<std::size_t>(2 * i + j)]; }
};
UBlock u_block(double p, double r);

/// J(p0, p1) = (p1 + b p0 / (1 + a^2 p0^2), -p0). Validates the input point.
CurvePoint curve_flow_map(const CurveParams& params, const CurvePoint& p, double tol_curve = NumericOptions{}.tol_curve);
/// The same rational map on the whole plane, without the curve check.
CurvePoint plane_flow_map(const CurveParams& params, const CurvePoint& p) noexcept;
/// J^{-1}(p0, p1) = (-p1, p0 + b p1 / (1 + a^2 p1^2)).
CurvePoint curve_flow_map_inverse(const CurveParams& params, const CurvePoint& p,
                                  double tol_curve = NumericOptions{}.tol_curve);

struct GeometricStep {
  CurvePoint point;
  bool tangent = false;  // the horizontal line touches the curve (double root)
};
/// Reflect to (-p1, -p0), then take the other intersection of the line y = -p0 with the curve.
GeometricStep geometric_flow_step(const CurveParams& params, const CurvePoint& p,
                                  double tol_curve = NumericOptions{}.tol_curve);

/// One step of the Jacobi flow, S^{-1} U^T A U S, computed blockwise. Tails move by J.
SmpOperator flow_step(const SmpOperator& A, const NumericOptions& opt = {});

/// The unique A with flow_step(A) = A1, as S^2 tau(flow_step(S^2 tau(A1) S^{-2})) S^{-2}.
SmpOperator flow_step_inverse(const SmpOperator& A1, const NumericOptions& opt = {});

/// k steps of the flow; negative k runs the inverse flow.
SmpOperator flow_iterate(const SmpOperator& A, int k, const NumericOptions& opt = {});

/// a_k = sqrt(p_0^2 + r_1^2) and b_{k-1} = q_{-1} read from A^{(k)}, for k in [k_lo, k_hi].
JacobiOperator extract_jacobi(const SmpOperator& A, int k_lo, int k_hi, const NumericOptions& opt = {});

/// a_n^2 = 1/a^2 + (p0^{(n)})^2, b_{n-1} = -b/a - a p0^{(n)} p1^{(n)} along the orbit of p.
JacobiOperator periodic_jacobi_coeffs(const CurveParams& params, const CurvePoint& p, int n_lo, int n_hi,
                                      double tol_curve = NumericOptions{}.tol_curve);

struct KrylovJacobi {
  JacobiOperator jacobi;
  double orthogonality_residual = 0.0;  // max |<e~_i, e~_j> - delta_ij|
};
/// Gram-Schmidt on the dense truncation [-N/2, N/2], seeded by e_{-1} and e~_0.
KrylovJacobi krylov_jacobi_oracle(const SmpOperator& A, int N, int k_lo, int k_hi);

struct Orbit {
  std::vector<CurvePoint> points;  // n = 0 .. N
  std::vector<double> residuals;   // curve residual of each point
  bool periodic = false;
  int period = 0;
  double min_return_distance = 0.0;  // over n = 1 .. N
  double max_residual() const;
};
/// N iterates of J without reprojection, with closure diagnosis.
Orbit orbit(const CurveParams& params, const CurvePoint& p, int N, double closure_tol = 1e-9,
            double tol_curve = NumericOptions{}.tol_curve);

}  // namespace smpflow
