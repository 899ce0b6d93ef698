#include "smpflow/serialization.hpp"

#include <sstream>

#include <json.hpp>

#include "smpflow/error.hpp"

namespace smpflow {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

// Wraps nlohmann type errors so callers see a single error family.
template <class F>
auto guarded(const char* what, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

json point_json(const CurvePoint& p) { return json::array({p.p0, p.p1}); }

CurvePoint point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("a tail point must be [p0, p1]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json curve_json(const CurveParams& c) { return {{"a", c.a()}, {"b", c.b()}}; }

CurveParams curve_from(const json& j) { return CurveParams(j.at("a").get<double>(), j.at("b").get<double>()); }

}  // namespace

std::string to_json(const CurveParams& params) { return curve_json(params).dump(); }

std::string to_json(const TwoIntervalSet& E) {
  return json{{"b0", E.b0}, {"a1", E.a1}, {"b1", E.b1}, {"a0", E.a0}}.dump();
}

std::string to_json(const JacobiOperator& J) { return json{{"k_min", J.k_min}, {"a", J.a}, {"b", J.b}}.dump(); }

std::string to_json(const KsReport& r) {
  return json{{"H", r.H},
              {"H_plus", r.H_plus},
              {"delta", r.delta},
              {"main_lemma_residual", r.main_lemma_residual},
              {"window", json::array({r.window[0], r.window[1]})}}
      .dump();
}

std::string to_json(const UniformizationData& U) {
  return json{{"rho", U.rho}, {"I_num", U.I_num}, {"I_den", U.I_den}}.dump();
}

std::string to_json(const SmpOperator& A) {
  const SmpCore& c = A.core();
  json j{{"curve", curve_json(A.curve())},
         {"left_tail", point_json(A.left_tail())},
         {"right_tail", point_json(A.right_tail())},
         {"core", {{"k_min", c.k_min}, {"p", c.p}, {"q_odd", c.q_odd}, {"r_odd", c.r_odd}}}};
  if (A.scale() != 1.0) j["scale"] = A.scale();
  return j.dump();
}

SmpOperator operator_from_json(const std::string& text, double tol_curve) {
  const json j = parse(text);
  return guarded("operator", [&] {
    SmpCore c;
    const json& core = j.at("core");
    c.k_min = core.at("k_min").get<int>();
    c.p = core.at("p").get<std::vector<double>>();
    c.q_odd = core.at("q_odd").get<std::vector<double>>();
    c.r_odd = core.at("r_odd").get<std::vector<double>>();
    const double scale = j.contains("scale") ? j.at("scale").get<double>() : 1.0;
    return SmpOperator(curve_from(j.at("curve")), point_from(j.at("left_tail")), point_from(j.at("right_tail")),
                       std::move(c), scale, tol_curve);
  });
}

CurveParams curve_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded("curve", [&] { return curve_from(j); });
}

TwoIntervalSet endpoints_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded("endpoints", [&] {
    TwoIntervalSet E{j.at("b0").get<double>(), j.at("a1").get<double>(), j.at("b1").get<double>(),
                     j.at("a0").get<double>()};
    E.validate();
    return E;
  });
}

JacobiOperator jacobi_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded("Jacobi operator", [&] {
    JacobiOperator J;
    J.k_min = j.at("k_min").get<int>();
    J.a = j.at("a").get<std::vector<double>>();
    J.b = j.at("b").get<std::vector<double>>();
    J.validate();
    return J;
  });
}

std::string orbit_csv(const Orbit& o) {
  std::ostringstream os;
  os.precision(17);
  os << "n,p0,p1,residual\n";
  for (std::size_t n = 0; n < o.points.size(); ++n) {
    os << n << ',' << o.points[n].p0 << ',' << o.points[n].p1 << ',' << o.residuals[n] << '\n';
  }
  return os.str();
}

}  // namespace smpflow
