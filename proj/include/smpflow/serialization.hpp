#pragma once

#include <string>

#include "smpflow/jacobi_flow.hpp"
#include "smpflow/ks_functional.hpp"
#include "smpflow/options.hpp"
#include "smpflow/smp_operator.hpp"
#include "smpflow/spectral.hpp"
#include "smpflow/uniformization.hpp"

namespace smpflow {

// JSON text in and out. Loaders throw ValidationError on malformed input.
std::string to_json(const CurveParams& params);
std::string to_json(const TwoIntervalSet& E);
std::string to_json(const JacobiOperator& J);
std::string to_json(const KsReport& r);
std::string to_json(const UniformizationData& U);

/// {"curve":{"a","b"},"left_tail":[p0,p1],"right_tail":[p0,p1],"core":{"k_min","p","q_odd","r_odd"}}
/// plus "scale" when it is not 1.
std::string to_json(const SmpOperator& A);
SmpOperator operator_from_json(const std::string& text, double tol_curve = NumericOptions{}.tol_curve);

CurveParams curve_from_json(const std::string& text);
TwoIntervalSet endpoints_from_json(const std::string& text);
JacobiOperator jacobi_from_json(const std::string& text);

/// Header n,p0,p1,residual, one row per iterate.
std::string orbit_csv(const Orbit& o);

}  // namespace smpflow
