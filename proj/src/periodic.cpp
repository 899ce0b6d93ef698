#include "smpflow/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smpflow/error.hpp"

namespace smpflow {

namespace {
constexpr double kMagicTol = 1e-10;
constexpr int kConstructionWindow = 16;
}  // namespace

SmpOperator build_periodic_smp(const CurveParams& params, const CurvePoint& p, const NumericOptions& opt) {
  SmpOperator A = SmpOperator::periodic(params, p, 1.0, opt.tol_curve);
  const double res = magic_residual(A, params, kConstructionWindow, opt);
  if (!(res <= kMagicTol)) {
    std::ostringstream os;
    os << "periodic operator fails the magic formula (residual " << res << ")";
    throw StructureError(os.str());
  }
  return A;
}

double magic_residual(const SmpOperator& A, const CurveParams& params, int N, const NumericOptions& opt) {
  if (N < 4) throw ValidationError("magic residual window must have N >= 4");
  const int center = A.core().empty() ? 0 : (A.k_min() + A.k_max()) / 2;
  const int lo = center - N / 2;
  const int hi = lo + N - 1;
  const InverseBands inv = inverse_band_entries(A, lo, hi, opt);
  const double a = params.a();
  const double b = params.b();
  const double s = A.scale();
  // Entries of a (A/s) + b - (A/s)^{-1} - S^2 - S^{-2}, with (A/s)^{-1} = s A^{-1}.
  double res = s * std::max(inv.max_off_band, inv.max_structural_zero);
  for (int k = lo; k <= hi; ++k) {
    res = std::max(res, std::abs(a / s * A.q(k) + b - s * inv.sigma(k)));
    res = std::max(res, std::abs(a / s * A.p(k) - s * inv.pi(k)));
    const double outer = (k % 2 != 0) ? a / s * A.r(k) - s * inv.outer_at(k) : -s * inv.outer_at(k);
    res = std::max(res, std::abs(outer - 1.0));
  }
  return res;
}

}  // namespace smpflow
