#pragma once

#include <vector>

namespace smpflow::detail {

/// LU factorization of a square band matrix (LAPACK gbtrf/gbcon/gbtrs).
class BandedLU {
 public:
  BandedLU(int n, int kl, int ku);

  /// Sets A(i, j), 0-based, |i - j| within the band. Only valid before factor().
  void set(int i, int j, double value);
  /// Factorizes in place; throws SingularError on an exactly singular pivot.
  void factor();
  /// Reciprocal 1-norm condition estimate of the factored matrix.
  double rcond() const;
  /// Solves A X = B for column-major B with n rows and nrhs columns, in place.
  void solve(std::vector<double>& rhs, int nrhs) const;

  int size() const noexcept { return n_; }

 private:
  int n_;
  int kl_;
  int ku_;
  int ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  double anorm_ = 0.0;
  bool factored_ = false;
};

}  // namespace smpflow::detail
