#include "smpflow/jacobi_flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "smpflow/error.hpp"

namespace smpflow {

namespace {

using Mat2 = Eigen::Matrix2d;

Mat2 to_eigen(const UBlock& u) {
  Mat2 m;
  m << u(0, 0), u(0, 1), u(1, 0), u(1, 1);
  return m;
}

int floor_div2(int k) { return (k >= 0) ? k / 2 : -((-k + 1) / 2); }

}  // namespace

UBlock u_block(double p, double r) {
  const double n = std::hypot(p, r);
  if (!(n > 0.0)) throw DomainError("u_block needs p^2 + r^2 > 0");
  return UBlock{{p / n, r / n, r / n, -p / n}};
}

CurvePoint plane_flow_map(const CurveParams& params, const CurvePoint& p) noexcept {
  const double a = params.a();
  return {p.p1 + params.b() * p.p0 / (1.0 + a * a * p.p0 * p.p0), -p.p0};
}

CurvePoint curve_flow_map(const CurveParams& params, const CurvePoint& p, double tol_curve) {
  require_on_curve(params, p, tol_curve, "flow map input");
  return plane_flow_map(params, p);
}

CurvePoint curve_flow_map_inverse(const CurveParams& params, const CurvePoint& p, double tol_curve) {
  require_on_curve(params, p, tol_curve, "inverse flow map input");
  const double a = params.a();
  return {-p.p1, p.p0 + params.b() * p.p1 / (1.0 + a * a * p.p1 * p.p1)};
}

GeometricStep geometric_flow_step(const CurveParams& params, const CurvePoint& p, double tol_curve) {
  require_on_curve(params, p, tol_curve, "geometric step input");
  const double a = params.a();
  const double b = params.b();
  // Symmetric point (x, y) = (-p1, -p0). On the line y = -p0 the curve reads
  // (1 + a^2 p0^2) x^2 - b p0 x + (p0^2 - 1/a) = 0, one root being x = -p1.
  const double y = -p.p0;
  const double known = -p.p1;
  const double lead = 1.0 + a * a * y * y;
  const double root_sum = -b * y / lead;
  const double other = root_sum - known;
  const double disc = b * b * y * y - 4.0 * lead * (y * y - 1.0 / a);
  const double disc_scale = b * b * y * y + 4.0 * lead * (y * y + 1.0 / a);
  GeometricStep out;
  out.point = {other, y};
  out.tangent = std::abs(disc) <= 1e-12 * disc_scale;
  return out;
}

SmpOperator flow_step(const SmpOperator& A, const NumericOptions& opt) {
  const int K0 = floor_div2(A.k_min());
  const int K1 = floor_div2(A.k_max());  // K1 = K0 - 1 for an empty core

  std::map<int, Mat2> U;
  for (int k = K0 - 1; k <= K1 + 1; ++k) U[k] = to_eigen(u_block(A.p(2 * k), A.r(2 * k + 1)));

  auto diag_block = [&](int k) {
    Mat2 d;
    d << A.q(2 * k), A.p(2 * k + 1), A.p(2 * k + 1), A.q(2 * k + 1);
    return Mat2(U[k].transpose() * d * U[k]);
  };
  auto off_block = [&](int k) {
    Mat2 m;
    m << 0.0, 0.0, A.p(2 * k), A.r(2 * k + 1);
    return Mat2(U[k - 1].transpose() * m * U[k]);
  };

  const int lo = 2 * K0 - 2;
  const int hi = 2 * K1 + 1;
  SmpCore c;
  c.k_min = lo;
  for (int j = lo; j <= hi; ++j) {
    if (j % 2 == 0) {
      c.p.push_back(diag_block(j / 2)(0, 1));
    } else {
      const int k = (j + 1) / 2;
      const Mat2 y = off_block(k);
      c.p.push_back(y(1, 0));
      c.q_odd.push_back(diag_block(k)(0, 0));
      c.r_odd.push_back(y(0, 0));
    }
  }
  const CurveParams& cp = A.curve();
  return SmpOperator(cp, plane_flow_map(cp, A.left_tail()), plane_flow_map(cp, A.right_tail()), std::move(c),
                     A.scale(), opt.tol_curve)
      .canonical(opt.absorb_tol);
}

namespace {

// tau maps the sign pattern rho_{2k} < 0 to r_{2k+1} > 0; without it the blocks U_m
// of the intermediate step pick the wrong gauge and the inverse is not recovered.
void require_positive_r(const SmpOperator& A, const char* what) {
  for (int k = A.k_min() + 1; k <= A.k_max(); k += 2) {
    if (!(A.r(k) > 0.0)) {
      std::ostringstream os;
      os << what << ": operator is outside the SMP sign class (rho_" << k - 1 << " >= 0)";
      throw StructureError(os.str());
    }
  }
}

}  // namespace

SmpOperator flow_step_inverse(const SmpOperator& A1, const NumericOptions& opt) {
  const SmpOperator t = tau_involution(A1, opt).shifted(1);
  require_positive_r(t, "inverse flow");
  return tau_involution(flow_step(t, opt), opt).shifted(1);
}

SmpOperator flow_iterate(const SmpOperator& A, int k, const NumericOptions& opt) {
  SmpOperator cur = A;
  for (int i = 0; i < std::abs(k); ++i) cur = k > 0 ? flow_step(cur, opt) : flow_step_inverse(cur, opt);
  return cur;
}

JacobiOperator extract_jacobi(const SmpOperator& A, int k_lo, int k_hi, const NumericOptions& opt) {
  if (k_lo > k_hi) throw ValidationError("extract_jacobi needs k_lo <= k_hi");
  // A^{(k)} for k in [k_lo, k_hi + 1].
  std::map<int, SmpOperator> flowed;
  flowed.emplace(0, A);
  for (int k = 1; k <= k_hi + 1; ++k) flowed.emplace(k, flow_step(flowed.at(k - 1), opt));
  for (int k = -1; k >= k_lo; --k) flowed.emplace(k, flow_step_inverse(flowed.at(k + 1), opt));

  JacobiOperator J;
  J.k_min = k_lo;
  for (int k = k_lo; k <= k_hi; ++k) {
    const SmpOperator& Ak = flowed.at(k);
    J.a.push_back(std::hypot(Ak.p(0), Ak.r(1)));
    J.b.push_back(flowed.at(k + 1).q(-1));
  }
  J.validate();
  return J;
}

JacobiOperator periodic_jacobi_coeffs(const CurveParams& params, const CurvePoint& p, int n_lo, int n_hi,
                                      double tol_curve) {
  if (n_lo > n_hi) throw ValidationError("periodic_jacobi_coeffs needs n_lo <= n_hi");
  require_on_curve(params, p, tol_curve, "periodic Jacobi start point");
  const double a = params.a();
  const double b = params.b();
  std::map<int, CurvePoint> pts;
  pts[0] = p;
  for (int n = 1; n <= n_hi + 1; ++n) pts[n] = plane_flow_map(params, pts[n - 1]);
  for (int n = -1; n >= n_lo; --n) {
    const CurvePoint& x = pts[n + 1];
    pts[n] = {-x.p1, x.p0 + b * x.p1 / (1.0 + a * a * x.p1 * x.p1)};
  }
  JacobiOperator J;
  J.k_min = n_lo;
  for (int n = n_lo; n <= n_hi; ++n) {
    const CurvePoint& x = pts[n];
    const CurvePoint& y = pts[n + 1];
    J.a.push_back(std::sqrt(1.0 / (a * a) + x.p0 * x.p0));
    J.b.push_back(-b / a - a * y.p0 * y.p1);
  }
  return J;
}

KrylovJacobi krylov_jacobi_oracle(const SmpOperator& A, int N, int k_lo, int k_hi) {
  if (k_lo > k_hi) throw ValidationError("krylov oracle needs k_lo <= k_hi");
  const int reach = std::max(std::abs(k_lo), std::abs(k_hi));
  if (N < 20 * reach + 100) {
    std::ostringstream os;
    os << "krylov oracle needs N >= " << 20 * reach + 100 << " for |k| <= " << reach;
    throw ValidationError(os.str());
  }
  const int h = N / 2;
  const Eigen::MatrixXd M = dense_truncation(A, -h, h);
  const int n = 2 * h + 1;

  std::map<int, Eigen::VectorXd> e;
  e[-1] = Eigen::VectorXd::Zero(n);
  e[-1](h - 1) = 1.0;
  const TildeE0 t = tilde_e0(A);
  e[0] = Eigen::VectorXd::Zero(n);
  e[0](h) = t.c0;
  e[0](h + 1) = t.c1;

  auto orthogonalize = [&](Eigen::VectorXd v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& [k, u] : e) v -= u.dot(v) * u;
    }
    return v;
  };

  std::map<int, double> acoef;
  acoef[0] = (M * e[-1]).dot(e[0]);
  const int top = std::max(k_hi, 0);
  for (int k = 1; k <= top; ++k) {
    Eigen::VectorXd v = orthogonalize(M * e[k - 1]);
    const double norm = v.norm();
    if (!(norm > 0.0)) throw ConvergenceError("krylov chain broke down (forward)");
    acoef[k] = norm;
    e[k] = v / norm;
  }
  const int bottom = std::min(k_lo, -1);
  for (int k = -1; k >= bottom; --k) {
    Eigen::VectorXd v = orthogonalize(M * e[k]);
    const double norm = v.norm();
    if (!(norm > 0.0)) throw ConvergenceError("krylov chain broke down (backward)");
    acoef[k] = norm;
    e[k - 1] = v / norm;
  }

  KrylovJacobi out;
  for (const auto& [i, u] : e) {
    for (const auto& [j, w] : e) {
      out.orthogonality_residual = std::max(out.orthogonality_residual, std::abs(u.dot(w) - (i == j ? 1.0 : 0.0)));
    }
  }
  if (out.orthogonality_residual > 1e-8) {
    std::ostringstream os;
    os << "krylov basis lost orthogonality (" << out.orthogonality_residual << ")";
    throw ConvergenceError(os.str());
  }
  out.jacobi.k_min = k_lo;
  for (int k = k_lo; k <= k_hi; ++k) {
    out.jacobi.a.push_back(acoef.at(k));
    out.jacobi.b.push_back((M * e.at(k)).dot(e.at(k)));
  }
  out.jacobi.validate();
  return out;
}

double Orbit::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

Orbit orbit(const CurveParams& params, const CurvePoint& p, int N, double closure_tol, double tol_curve) {
  if (N < 1) throw ValidationError("orbit needs N >= 1");
  require_on_curve(params, p, tol_curve, "orbit start point");
  Orbit o;
  o.points.reserve(static_cast<std::size_t>(N) + 1);
  o.points.push_back(p);
  for (int n = 1; n <= N; ++n) o.points.push_back(plane_flow_map(params, o.points.back()));
  for (const auto& x : o.points) o.residuals.push_back(curve_residual(params, x));

  o.min_return_distance = INFINITY;
  for (int n = 1; n <= N; ++n) o.min_return_distance = std::min(o.min_return_distance, distance(o.points[n], p));

  for (int T = 1; 4 * T <= N && !o.periodic; ++T) {
    if (distance(o.points[static_cast<std::size_t>(T)], p) > closure_tol) continue;
    bool repeats = true;
    for (int n = 0; n < 3 * T && repeats; ++n) {
      repeats = distance(o.points[static_cast<std::size_t>(n + T)], o.points[static_cast<std::size_t>(n)]) <= closure_tol;
    }
    if (repeats) {
      o.periodic = true;
      o.period = T;
    }
  }
  return o;
}

}  // namespace smpflow
