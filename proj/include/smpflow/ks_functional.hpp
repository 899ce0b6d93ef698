#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "smpflow/options.hpp"
#include "smpflow/smp_operator.hpp"

namespace smpflow {

/// Bands of V(A) = a A + b - A^{-1} on a window:
/// v1(j) = <V e_j, e_{j-2}>, v01(j) = a p_j - pi_j, v00(j) = a q_j + b - sigma_j.
struct VBandDecomposition {
  int j_lo = 0;
  std::vector<double> v1;
  std::vector<double> v01;
  std::vector<double> v00;
  double max_asymmetry = 0.0;

  int j_hi() const noexcept { return j_lo + static_cast<int>(v1.size()) - 1; }
  double v1_at(int j) const { return v1.at(static_cast<std::size_t>(j - j_lo)); }
  double v01_at(int j) const { return v01.at(static_cast<std::size_t>(j - j_lo)); }
  double v00_at(int j) const { return v00.at(static_cast<std::size_t>(j - j_lo)); }
  /// [[v1_{2j}, 0], [v01_{2j}, v1_{2j+1}]]
  Eigen::Matrix2d block_v(int j) const;
  /// [[v00_{2j}, v01_{2j+1}], [v01_{2j+1}, v00_{2j+1}]]
  Eigen::Matrix2d block_w(int j) const;
};

VBandDecomposition v_decomposition(const SmpOperator& A, int j_lo, int j_hi, const NumericOptions& opt = {});

/// Window used for the doubly infinite sums: core plus a margin of 8.
std::array<int, 2> ks_window(const SmpOperator& A);

/// H(A) = 1/2 tr (v^{(0)})^2 + sum_j { (v1_j)^2 - 1 - log (v1_j)^2 }.
double ks_full(const SmpOperator& A, const NumericOptions& opt = {});

struct KsHalfRoutes {
  double bands = 0.0;   // per-band sum with boundary weights
  double blocks = 0.0;  // 2x2 block trace form
};
KsHalfRoutes ks_half_routes(const SmpOperator& A, const NumericOptions& opt = {});

/// Half-axis functional H_+(A); throws if the two routes disagree beyond 1e-12.
double ks_half(const SmpOperator& A, const NumericOptions& opt = {});

/// 1/2 sum_{j_lo <= j <= j_hi} { tr w_j^2 + tr v_j^T v_j + tr v_{j+1} v_{j+1}^T - 4 - log prod_l (v1_{2j+l})^2 }.
double blocks_trace_form(const VBandDecomposition& V, int j_lo, int j_hi);

/// One-step decrement delta H_+(A), read from the bands of flow_step(A) at indices -1, 0, 1.
double delta_half(const SmpOperator& A, const NumericOptions& opt = {});

/// |H_+(A) - H_+(flow_step(A)) - delta H_+(A)|.
double main_lemma_residual(const SmpOperator& A, const NumericOptions& opt = {});

struct KsReport {
  double H = 0.0;
  double H_plus = 0.0;
  double delta = 0.0;
  double main_lemma_residual = 0.0;
  std::array<int, 2> window{0, 0};
};
KsReport ks_report(const SmpOperator& A, const NumericOptions& opt = {});

}  // namespace smpflow
