#pragma once

#include <random>

#include "smpflow/options.hpp"
#include "smpflow/smp_operator.hpp"
#include "smpflow/spectral.hpp"

namespace smpflow {

using Rng = std::mt19937_64;

/// a uniform in [a_lo, a_hi], b uniform in [b_lo, b_hi].
CurveParams random_params(Rng& rng, double a_lo = 0.2, double a_hi = 5.0, double b_lo = -3.0, double b_hi = 3.0);

/// p0 uniform in the feasible interval, then one of the p1 roots at random.
CurvePoint random_curve_point(const CurveParams& params, Rng& rng);

struct PerturbationSpec {
  int max_core_width = 20;    // indices, so at most 10 blocks
  double amplitude = 0.3;     // |delta| bound; absolute for p and q, relative for r
  bool independent_tails = true;
};

/// Eventually periodic operator: random A(E) tails and a perturbed core. Draws
/// whose truncations are badly conditioned (0 too close to the spectrum) are redrawn.
SmpOperator random_eventually_periodic(const CurveParams& params, Rng& rng, const PerturbationSpec& spec = {},
                                       const NumericOptions& opt = {});

}  // namespace smpflow
