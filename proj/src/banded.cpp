#include "banded.hpp"

#include <cmath>
#include <lapacke.h>
#include <string>

#include "smpflow/error.hpp"

static_assert(sizeof(lapack_int) == sizeof(int), "ipiv storage assumes 32-bit lapack_int");

namespace smpflow::detail {

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0),
      ipiv_(static_cast<std::size_t>(n), 0) {}

void BandedLU::set(int i, int j, double value) {
  ab_[static_cast<std::size_t>(kl_ + ku_ + i - j) + static_cast<std::size_t>(j) * ldab_] = value;
}

void BandedLU::factor() {
  anorm_ = 0.0;
  for (int j = 0; j < n_; ++j) {
    double col = 0.0;
    for (int d = 0; d < kl_ + ku_ + 1; ++d) col += std::abs(ab_[static_cast<std::size_t>(kl_ + d) + static_cast<std::size_t>(j) * ldab_]);
    anorm_ = std::max(anorm_, col);
  }
  const lapack_int info =
      LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_, reinterpret_cast<lapack_int*>(ipiv_.data()));
  if (info > 0) throw SingularError("banded truncation is singular (zero pivot at row " + std::to_string(info) + ")");
  if (info < 0) throw SingularError("dgbtrf rejected argument " + std::to_string(-info));
  factored_ = true;
}

double BandedLU::rcond() const {
  double rc = 0.0;
  const lapack_int info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', n_, kl_, ku_, ab_.data(), ldab_,
                                         reinterpret_cast<const lapack_int*>(ipiv_.data()), anorm_, &rc);
  if (info != 0) throw SingularError("dgbcon failed");
  return rc;
}

void BandedLU::solve(std::vector<double>& rhs, int nrhs) const {
  const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, nrhs, ab_.data(), ldab_,
                                         reinterpret_cast<const lapack_int*>(ipiv_.data()), rhs.data(), n_);
  if (info != 0) throw SingularError("dgbtrs failed");
}

}  // namespace smpflow::detail
