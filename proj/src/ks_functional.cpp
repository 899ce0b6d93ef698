#include "smpflow/ks_functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smpflow/error.hpp"
#include "smpflow/jacobi_flow.hpp"

namespace smpflow {

namespace {

constexpr int kMargin = 8;

void require_unit_scale(const SmpOperator& A) {
  if (A.scale() != 1.0) throw ValidationError("the functional needs operators with A(E) tails (scale 1)");
}

// x^2 - 1 - log x^2, with log x^2 taken as 2 log |x|.
double log_term(double x, int j) {
  if (x == 0.0) {
    std::ostringstream os;
    os << "v1_" << j << " = 0: the log term diverges";
    throw DomainError(os.str());
  }
  return x * x - 1.0 - 2.0 * std::log(std::abs(x));
}

double log_sq(double x) { return 2.0 * std::log(std::abs(x)); }

int half_top(const SmpOperator& A) { return std::max(A.k_max() + kMargin, 3); }

}  // namespace

Eigen::Matrix2d VBandDecomposition::block_v(int j) const {
  Eigen::Matrix2d m;
  m << v1_at(2 * j), 0.0, v01_at(2 * j), v1_at(2 * j + 1);
  return m;
}

Eigen::Matrix2d VBandDecomposition::block_w(int j) const {
  Eigen::Matrix2d m;
  m << v00_at(2 * j), v01_at(2 * j + 1), v01_at(2 * j + 1), v00_at(2 * j + 1);
  return m;
}

VBandDecomposition v_decomposition(const SmpOperator& A, int j_lo, int j_hi, const NumericOptions& opt) {
  if (j_lo > j_hi) throw ValidationError("band window is empty");
  const InverseBands inv = inverse_band_entries(A, j_lo, j_hi, opt);
  const double a = A.curve().a();
  const double b = A.curve().b();
  VBandDecomposition V;
  V.j_lo = j_lo;
  V.max_asymmetry = inv.max_asymmetry;
  for (int j = j_lo; j <= j_hi; ++j) {
    V.v1.push_back((j % 2 != 0) ? a * A.r(j) - inv.outer_at(j) : -inv.outer_at(j));
    V.v01.push_back(a * A.p(j) - inv.pi(j));
    V.v00.push_back(a * A.q(j) + b - inv.sigma(j));
  }
  return V;
}

std::array<int, 2> ks_window(const SmpOperator& A) { return {A.k_min() - kMargin, A.k_max() + kMargin}; }

double ks_full(const SmpOperator& A, const NumericOptions& opt) {
  require_unit_scale(A);
  const auto w = ks_window(A);
  const VBandDecomposition V = v_decomposition(A, w[0], w[1], opt);
  double quad = 0.0;
  double logs = 0.0;
  for (int j = w[0]; j <= w[1]; ++j) {
    quad += V.v00_at(j) * V.v00_at(j) + 2.0 * V.v01_at(j) * V.v01_at(j);
    logs += log_term(V.v1_at(j), j);
  }
  return 0.5 * quad + logs;
}

double blocks_trace_form(const VBandDecomposition& V, int j_lo, int j_hi) {
  double s = 0.0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const Eigen::Matrix2d w = V.block_w(j);
    const Eigen::Matrix2d v = V.block_v(j);
    const Eigen::Matrix2d v_next = V.block_v(j + 1);
    double logs = 0.0;
    for (int l = 0; l < 4; ++l) logs += log_sq(V.v1_at(2 * j + l));
    s += (w * w).trace() + (v.transpose() * v).trace() + (v_next * v_next.transpose()).trace() - 4.0 - logs;
  }
  return 0.5 * s;
}

KsHalfRoutes ks_half_routes(const SmpOperator& A, const NumericOptions& opt) {
  require_unit_scale(A);
  int top = half_top(A);
  if (top % 2 == 0) ++top;
  // The block form reads v1 up to index 2 J + 3 for its last block J.
  const int J = (top - 1) / 2;
  const VBandDecomposition V = v_decomposition(A, 0, 2 * J + 3, opt);

  KsHalfRoutes r;
  const double v10 = V.v1_at(0);
  const double v11 = V.v1_at(1);
  if (v10 == 0.0 || v11 == 0.0) throw DomainError("v1_0 or v1_1 vanishes: the log term diverges");
  r.bands = 0.5 * (v10 * v10 + v11 * v11 - 2.0 - log_sq(v10) - log_sq(v11)) + 0.5 * V.v01_at(0) * V.v01_at(0);
  for (int j = 2; j <= V.j_hi(); ++j) r.bands += log_term(V.v1_at(j), j);
  for (int j = 1; j <= V.j_hi(); ++j) r.bands += V.v01_at(j) * V.v01_at(j);
  double d = 0.0;
  for (int j = 0; j <= V.j_hi(); ++j) d += V.v00_at(j) * V.v00_at(j);
  r.bands += 0.5 * d;

  r.blocks = blocks_trace_form(V, 0, J);
  return r;
}

double ks_half(const SmpOperator& A, const NumericOptions& opt) {
  const KsHalfRoutes r = ks_half_routes(A, opt);
  if (std::abs(r.bands - r.blocks) > 1e-12 * std::max(1.0, std::abs(r.bands))) {
    std::ostringstream os;
    os.precision(17);
    os << "half-axis functional routes disagree: " << r.bands << " vs " << r.blocks;
    throw ConvergenceError(os.str());
  }
  return r.bands;
}

double delta_half(const SmpOperator& A, const NumericOptions& opt) {
  require_unit_scale(A);
  const SmpOperator A1 = flow_step(A, opt);
  const InverseBands inv = inverse_band_entries(A1, -1, 1, opt);
  const double a = A.curve().a();
  const double b = A.curve().b();
  const double u = a * A1.r(-1);
  const double v = a * A1.r(1);
  if (u == 0.0 || v == 0.0) throw DomainError("r of the flowed operator vanishes: the log term diverges");
  const double g1 = 0.5 * (u * u + v * v - 2.0 - (log_sq(u) + log_sq(v)));
  const double x = a * A1.p(-1) - inv.pi(-1);
  const double y = a * A1.p(0) - inv.pi(0);
  const double z = a * A1.q(-1) + b - inv.sigma(-1);
  return g1 + 0.5 * (x * x + y * y) + 0.5 * z * z;
}

double main_lemma_residual(const SmpOperator& A, const NumericOptions& opt) {
  return std::abs(ks_half(A, opt) - ks_half(flow_step(A, opt), opt) - delta_half(A, opt));
}

KsReport ks_report(const SmpOperator& A, const NumericOptions& opt) {
  KsReport r;
  r.window = ks_window(A);
  r.H = ks_full(A, opt);
  r.H_plus = ks_half(A, opt);
  r.delta = delta_half(A, opt);
  const double h1 = ks_half(flow_step(A, opt), opt);
  r.main_lemma_residual = std::abs(r.H_plus - h1 - r.delta);
  return r;
}

}  // namespace smpflow
