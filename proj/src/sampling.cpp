#include "smpflow/sampling.hpp"

#include <algorithm>

#include "smpflow/error.hpp"

namespace smpflow {

namespace {
constexpr int kMaxRedraws = 100;
}

CurveParams random_params(Rng& rng, double a_lo, double a_hi, double b_lo, double b_hi) {
  std::uniform_real_distribution<double> ua(a_lo, a_hi);
  std::uniform_real_distribution<double> ub(b_lo, b_hi);
  const double a = ua(rng);
  const double b = ub(rng);
  return CurveParams(a, b);
}

CurvePoint random_curve_point(const CurveParams& params, Rng& rng) {
  const double bound = feasible_p0_bound(params);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (;;) {
    const double p0 = u(rng);
    const auto roots = curve_solve_p1(params, p0);
    if (roots.empty()) continue;
    const std::size_t pick = roots.size() == 1 ? 0 : static_cast<std::size_t>(rng() % 2);
    return {p0, roots[pick]};
  }
}

SmpOperator random_eventually_periodic(const CurveParams& params, Rng& rng, const PerturbationSpec& spec,
                                       const NumericOptions& opt) {
  if (spec.max_core_width < 2) throw ValidationError("core width must be at least 2");
  std::uniform_real_distribution<double> delta(-spec.amplitude, spec.amplitude);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const CurvePoint right = random_curve_point(params, rng);
    const CurvePoint left = spec.independent_tails ? random_curve_point(params, rng) : right;
    const int max_blocks = spec.max_core_width / 2;
    const int blocks = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_blocks));
    const int first_block = -static_cast<int>(rng() % static_cast<unsigned>(blocks + 1));
    const SmpOperator base = SmpOperator::periodic(params, right, 1.0, opt.tol_curve);

    SmpCore c;
    c.k_min = 2 * first_block;
    for (int k = c.k_min; k < c.k_min + 2 * blocks; ++k) {
      c.p.push_back(base.p(k) + delta(rng));
      if (k % 2 != 0) {
        c.q_odd.push_back(base.q(k) + delta(rng));
        c.r_odd.push_back(base.r(k) * (1.0 + delta(rng)));
      }
    }
    SmpOperator A(params, left, right, std::move(c), 1.0, opt.tol_curve);
    try {
      // SMP class sign pattern: r_{2k+1} > 0 (kept by the relative draw) and rho_{2k} < 0.
      const InverseBands inv = inverse_band_entries(A, A.k_min() - 4, A.k_max() + 4, opt);
      bool signs_ok = true;
      for (int k = inv.k_lo + (inv.k_lo % 2 != 0 ? 1 : 0); k <= inv.k_hi(); k += 2) signs_ok = signs_ok && inv.rho(k) < 0.0;
      if (signs_ok) return A;
    } catch (const SingularError&) {
    } catch (const ConvergenceError&) {
    }
  }
  throw ConvergenceError("could not draw an invertible eventually periodic operator");
}

}  // namespace smpflow
