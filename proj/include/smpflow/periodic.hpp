#pragma once

#include "smpflow/options.hpp"
#include "smpflow/smp_operator.hpp"
#include "smpflow/spectral.hpp"

namespace smpflow {

/// Period-two operator A(p) in A(E): r = 1/a, q_0 = a p0 p1, q_1 = -b/a - a p0 p1.
/// Fails loudly if the result does not satisfy the magic formula.
SmpOperator build_periodic_smp(const CurveParams& params, const CurvePoint& p, const NumericOptions& opt = {});

/// max |a A + b - A^{-1} - S^2 - S^{-2}| over an N-window centered on the core.
/// For operators carrying a tail scale s the identity is checked for A / s.
double magic_residual(const SmpOperator& A, const CurveParams& params, int N = 400, const NumericOptions& opt = {});

}  // namespace smpflow
