#pragma once

#include <vector>

#include <Eigen/Core>

#include "smpflow/options.hpp"
#include "smpflow/spectral.hpp"

namespace smpflow {

/// Finite window of a two-sided sequence, indices lo .. lo + values.size() - 1.
struct IndexedVector {
  int lo = 0;
  std::vector<double> values;

  int hi() const noexcept { return lo + static_cast<int>(values.size()) - 1; }
  bool contains(int k) const noexcept { return k >= lo && k <= hi(); }
  double at(int k) const { return values.at(static_cast<std::size_t>(k - lo)); }
  double& at(int k) { return values.at(static_cast<std::size_t>(k - lo)); }

  static IndexedVector zeros(int lo, int hi) { return {lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1))}; }
  static IndexedVector unit(int lo, int hi, int k) {
    auto v = zeros(lo, hi);
    v.at(k) = 1.0;
    return v;
  }
};

struct SparseEntry {
  int row;
  double value;
};
using SparseColumn = std::vector<SparseEntry>;

/// Coefficients stored in the finite core window [k_min, k_max], k_min even and
/// k_max odd. p covers every index of the window; q_odd and r_odd cover the odd
/// indices in increasing order. q at even indices is never stored.
struct SmpCore {
  int k_min = 0;
  std::vector<double> p;
  std::vector<double> q_odd;
  std::vector<double> r_odd;

  int k_max() const noexcept { return k_min + static_cast<int>(p.size()) - 1; }
  bool empty() const noexcept { return p.empty(); }
};

/// Two-sided SMP operator: a finite core between two exact period-two tails.
///
/// A e_{2n}   = p_{2n} e_{2n-1} + q_{2n} e_{2n} + p_{2n+1} e_{2n+1}
/// A e_{2n+1} = r_{2n+1} e_{2n-1} + p_{2n+1} e_{2n} + q_{2n+1} e_{2n+1} + p_{2n+2} e_{2n+2} + r_{2n+3} e_{2n+3}
///
/// with q_{2n} = p_{2n} p_{2n+1} / r_{2n+1}. Outside the core the coefficients
/// are scale times the period-two values of the tail curve point (r = 1/a,
/// q_1 = -b/a - a p0 p1). Operators built from curve points have scale 1; the
/// tau involution maps scale s to a/s.
class SmpOperator {
 public:
  SmpOperator(CurveParams curve, CurvePoint left_tail, CurvePoint right_tail, SmpCore core, double scale = 1.0,
              double tol_curve = NumericOptions{}.tol_curve);

  /// Purely periodic operator (empty core). Validates the curve point only.
  static SmpOperator periodic(const CurveParams& curve, const CurvePoint& point, double scale = 1.0,
                              double tol_curve = NumericOptions{}.tol_curve);

  const CurveParams& curve() const noexcept { return curve_; }
  const CurvePoint& left_tail() const noexcept { return left_; }
  const CurvePoint& right_tail() const noexcept { return right_; }
  const SmpCore& core() const noexcept { return core_; }
  double scale() const noexcept { return scale_; }
  int k_min() const noexcept { return core_.k_min; }
  int k_max() const noexcept { return core_.k_max(); }

  double p(int k) const;
  double q(int k) const;
  /// Outer coefficient A_{k-2,k}; k must be odd.
  double r(int k) const;
  /// Matrix entry A_{ij}.
  double entry(int i, int j) const;

  /// Conjugation by an even shift, S^{2m} A S^{-2m}: the coefficient at k moves to k + 2m.
  SmpOperator shifted(int m) const;
  /// Same operator with the core widened to contain [k_lo, k_hi].
  SmpOperator expanded(int k_lo, int k_hi) const;
  /// Absorbs core edge blocks that agree with the tails within tol.
  SmpOperator canonical(double tol = NumericOptions{}.absorb_tol) const;
  /// All p coefficients negated (the sign-pair partner).
  SmpOperator with_negated_p() const;

 private:
  CurveParams curve_;
  CurvePoint left_;
  CurvePoint right_;
  SmpCore core_;
  double scale_;

  const CurvePoint& tail_for(int k) const noexcept { return k < core_.k_min ? left_ : right_; }
  bool in_core(int k) const noexcept { return k >= core_.k_min && k <= core_.k_max(); }
};

/// Period-two coefficient values of scale * A(point).
double tail_p(const CurveParams& curve, const CurvePoint& point, double scale, int k) noexcept;
double tail_q_odd(const CurveParams& curve, const CurvePoint& point, double scale) noexcept;
double tail_r(const CurveParams& curve, double scale) noexcept;

/// Largest coefficient difference (p, q, r) over [k_lo, k_hi].
double coefficient_distance(const SmpOperator& x, const SmpOperator& y, int k_lo, int k_hi);
/// Same, modulo the joint sign flip of all p coefficients.
double coefficient_distance_mod_sign(const SmpOperator& x, const SmpOperator& y, int k_lo, int k_hi);

/// Entries of A^{-1} on a window: outer(k) = A^{-1}_{k-2,k} (rho_k at even k, a
/// structural zero at odd k), first(k) = A^{-1}_{k-1,k} = pi_k, diag(k) = sigma_k.
struct InverseBands {
  int k_lo = 0;
  std::vector<double> outer;
  std::vector<double> first;
  std::vector<double> diag;
  double max_structural_zero = 0.0;  // max |outer(k)| over odd k
  double max_off_band = 0.0;         // max |A^{-1}_{k-3,k}|, |A^{-1}_{k-4,k}|
  double max_asymmetry = 0.0;        // max |A^{-1}_{k-1,k} - A^{-1}_{k,k-1}|
  int padding = 0;                   // padding of the accepted solve
  double last_change = 0.0;          // agreement between the last two paddings
  double condition = 0.0;            // condition estimate of the truncation

  int k_hi() const noexcept { return k_lo + static_cast<int>(diag.size()) - 1; }
  double outer_at(int k) const { return outer.at(static_cast<std::size_t>(k - k_lo)); }
  double rho(int k) const;  // k even
  double pi(int k) const { return first.at(static_cast<std::size_t>(k - k_lo)); }
  double sigma(int k) const { return diag.at(static_cast<std::size_t>(k - k_lo)); }
};

/// Two-sided Jacobi coefficients a_k > 0 and b_k on a common window.
struct JacobiOperator {
  int k_min = 0;
  std::vector<double> a;
  std::vector<double> b;

  int k_max() const noexcept { return k_min + static_cast<int>(a.size()) - 1; }
  double a_at(int k) const { return a.at(static_cast<std::size_t>(k - k_min)); }
  double b_at(int k) const { return b.at(static_cast<std::size_t>(k - k_min)); }
  void validate() const;
};

SparseColumn column(const SmpOperator& A, int j);

/// y = A x on the indices whose full stencil lies inside x's window.
IndexedVector apply(const SmpOperator& A, const IndexedVector& x);

/// Dense symmetric matrix of A_{ij}, i, j in [k_lo, k_hi].
Eigen::MatrixXd dense_truncation(const SmpOperator& A, int k_lo, int k_hi);

/// Band entries of A^{-1} on [k_lo, k_hi] from padded banded solves, doubling
/// the padding until consecutive extractions agree within tol_inverse.
InverseBands inverse_band_entries(const SmpOperator& A, int k_lo, int k_hi, const NumericOptions& opt = {});

/// tau A = -S^{-1} A^{-1} S, read off the inverse bands. Note that
/// tau(tau A) = S^{-2} A S^2, i.e. tau squares to the even shift A.shifted(-1).
SmpOperator tau_involution(const SmpOperator& A, const NumericOptions& opt = {});

struct TildeE0 {
  double a0;  // sqrt(p_0^2 + r_1^2)
  double c0;  // coefficient of e_0
  double c1;  // coefficient of e_1
};
TildeE0 tilde_e0(const SmpOperator& A);

struct CyclicityReport {
  int dimension = 0;           // 2N + 1
  int interior_dimension = 0;  // after removing the boundary layer
  int interior_rank = 0;
  int krylov_vectors = 0;
  int deficit() const noexcept { return interior_dimension - interior_rank; }
};

/// Numerical rank of span{A^k e_{-1}, A^k tilde e_0 : |k| <= N/2} on the dense
/// truncation [-N, N], restricted to rows away from the truncation edges.
CyclicityReport cyclicity_check(const SmpOperator& A, int N, double rank_threshold = 1e-8, int boundary_layer = 4);

}  // namespace smpflow
