#include "smpflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "smpflow/error.hpp"
#include "smpflow/jacobi_flow.hpp"
#include "smpflow/ks_functional.hpp"
#include "smpflow/periodic.hpp"
#include "smpflow/sampling.hpp"
#include "smpflow/serialization.hpp"
#include "smpflow/uniformization.hpp"

namespace smpflow {

namespace {

class Tally {
 public:
  Tally(std::string suite, std::vector<InvariantResult>& out) : suite_(std::move(suite)), out_(out) {}

  void record(const std::string& name, double threshold, int cases, const std::function<double(int)>& residual) {
    InvariantResult r{suite_, name, cases, 0.0, threshold, false};
    try {
      for (int i = 0; i < cases; ++i) {
        const double v = residual(i);
        if (std::isnan(v)) {
          r.worst = NAN;
          break;
        }
        r.worst = std::max(r.worst, v);
      }
      r.pass = r.worst <= threshold;
    } catch (const Error&) {
      r.worst = std::numeric_limits<double>::infinity();
      r.pass = false;
    }
    out_.push_back(r);
  }

 private:
  std::string suite_;
  std::vector<InvariantResult>& out_;
};

void suite_spectral(Rng& rng, const NumericOptions& opt, std::vector<InvariantResult>& out) {
  Tally t("spectral", out);
  t.record("endpoint |V(e)| - 2", 1e-12, 50, [&](int) {
    const CurveParams c = random_params(rng);
    const TwoIntervalSet E = band_endpoints(c);
    double w = 0.0;
    for (double e : {E.b0, E.a1, E.b1, E.a0}) w = std::max(w, std::abs(std::abs(v_eval(c, e)) - 2.0));
    return w;
  });
  t.record("delta quadratic residual", 1e-12, 100, [&](int) {
    const CurveParams c = random_params(rng);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    std::complex<double> z{u(rng), u(rng)};
    if (std::abs(z.imag()) < 0.1) z += std::complex<double>(0.0, 0.5);
    const auto d = delta_eval(c, z);
    const auto V = v_eval(c, z);
    if (!(std::abs(d) < 1.0)) return std::numeric_limits<double>::infinity();
    return std::abs(d + 1.0 / d - V) / std::max(1.0, std::abs(V));
  });
  t.record("curve_solve_p1 root residual", 1e-12, 100, [&](int) {
    const CurveParams c = random_params(rng);
    const CurvePoint p = random_curve_point(c, rng);
    return std::abs(curve_residual(c, p)) / curve_scale(c);
  });
  t.record("magic residual of A(E)", 1e-10, 50, [&](int) {
    const CurveParams c = random_params(rng);
    return magic_residual(build_periodic_smp(c, random_curve_point(c, rng), opt), c, 400, opt);
  });
}

void suite_core(Rng& rng, const NumericOptions& opt, std::vector<InvariantResult>& out) {
  Tally t("core", out);
  t.record("operator JSON round trip", 0.0, 20, [&](int) {
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    const std::string s = to_json(A);
    return to_json(operator_from_json(s, opt.tol_curve)) == s ? 0.0 : 1.0;
  });
  t.record("tau squared = even shift", 1e-9, 10, [&](int) {
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    const SmpOperator B = tau_involution(tau_involution(A, opt), opt);
    return coefficient_distance(B, A.shifted(-1), A.k_min() - 12, A.k_max() + 12);
  });
  t.record("inverse mirror zeros", opt.tol_struct, 10, [&](int) {
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    const InverseBands inv = inverse_band_entries(A, A.k_min() - 10, A.k_max() + 10, opt);
    return std::max(inv.max_structural_zero, inv.max_off_band);
  });
  t.record("cyclicity interior deficit", 0.0, 3, [&](int) {
    const CurveParams c = random_params(rng, 0.5, 2.0, -2.0, 2.0);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    return static_cast<double>(cyclicity_check(A, 60).deficit());
  });
}

void suite_flow(Rng& rng, const NumericOptions& opt, std::vector<InvariantResult>& out) {
  Tally t("flow", out);
  t.record("curve residual after 1e3 steps", 1e-9, 20, [&](int) {
    const CurveParams c = random_params(rng);
    return orbit(c, random_curve_point(c, rng), 1000, 1e-9, opt.tol_curve).max_residual();
  });
  t.record("geometric step = curve map", 1e-13, 1000, [&](int) {
    const CurveParams c = random_params(rng);
    const CurvePoint p = random_curve_point(c, rng);
    return distance(geometric_flow_step(c, p, opt.tol_curve).point, curve_flow_map(c, p, opt.tol_curve));
  });
  t.record("periodic flow = A(J p)", 1e-12, 20, [&](int) {
    const CurveParams c = random_params(rng);
    const CurvePoint p = random_curve_point(c, rng);
    const SmpOperator F = flow_step(build_periodic_smp(c, p, opt), opt);
    const SmpOperator G = build_periodic_smp(c, curve_flow_map(c, p, opt.tol_curve), opt);
    return coefficient_distance(F, G, -6, 6);
  });
  t.record("r update", 1e-13, 10, [&](int) {
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    const SmpOperator F = flow_step(A, opt);
    double w = 0.0;
    for (int n = A.k_min() / 2 - 3; n <= A.k_max() / 2 + 3; ++n) {
      const double ratio = std::hypot(A.p(2 * n + 2), A.r(2 * n + 3)) / std::hypot(A.p(2 * n), A.r(2 * n + 1));
      const double expect = A.r(2 * n + 1) * ratio;
      w = std::max(w, std::abs(F.r(2 * n + 1) - expect) / std::max(1.0, std::abs(expect)));
    }
    return w;
  });
  t.record("inverse flow round trip", 1e-9, 10, [&](int) {
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    const SmpOperator B = flow_step(flow_step_inverse(A, opt), opt);
    return coefficient_distance(A, B, A.k_min() - 8, A.k_max() + 8);
  });
  t.record("extraction = Krylov oracle", 1e-8, 3, [&](int) {
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng, {}, opt);
    const JacobiOperator J = extract_jacobi(A, -5, 5, opt);
    const JacobiOperator K = krylov_jacobi_oracle(A, 400, -5, 5).jacobi;
    double w = 0.0;
    for (int k = -5; k <= 5; ++k) w = std::max({w, std::abs(J.a_at(k) - K.a_at(k)), std::abs(J.b_at(k) - K.b_at(k))});
    return w;
  });
}

void suite_ks(Rng& rng, const NumericOptions& opt, std::vector<InvariantResult>& out) {
  Tally t("ks", out);
  t.record("H, H_plus, delta on A(E)", 1e-10, 10, [&](int) {
    const CurveParams c = random_params(rng);
    const KsReport r = ks_report(build_periodic_smp(c, random_curve_point(c, rng), opt), opt);
    return std::max({std::abs(r.H), std::abs(r.H_plus), std::abs(r.delta)});
  });
  t.record("band route - block route", 1e-12, 10, [&](int) {
    const CurveParams c = random_params(rng);
    const KsHalfRoutes r = ks_half_routes(random_eventually_periodic(c, rng, {}, opt), opt);
    return std::abs(r.bands - r.blocks) / std::max(1.0, std::abs(r.bands));
  });
  t.record("negative part of delta", 1e-12, 10, [&](int) {
    const CurveParams c = random_params(rng);
    return std::max(0.0, -delta_half(random_eventually_periodic(c, rng, {}, opt), opt));
  });
  t.record("main lemma residual", 1e-8, 10, [&](int) {
    const CurveParams c = random_params(rng);
    return main_lemma_residual(random_eventually_periodic(c, rng, {}, opt), opt);
  });
}

void suite_uniformization(Rng& rng, const NumericOptions&, std::vector<InvariantResult>& out) {
  Tally t("uniformization", out);
  t.record("rho affine invariance", 1e-8, 5, [&](int) {
    const TwoIntervalSet E = band_endpoints(random_params(rng));
    std::uniform_real_distribution<double> lam(0.2, 5.0);
    std::uniform_real_distribution<double> sh(-3.0, 3.0);
    const double l = lam(rng);
    const double s = sh(rng);
    const TwoIntervalSet F{l * E.b0 + s, l * E.a1 + s, l * E.b1 + s, l * E.a0 + s};
    return std::abs(group_multiplier(F).rho / group_multiplier(E).rho - 1.0);
  });
  t.record("quadrature step halving", 1e-10, 5, [&](int) {
    return group_multiplier(band_endpoints(random_params(rng))).quadrature_change;
  });
  t.record("|Im w| on the right band", 1e-8, 5, [&](int) {
    const TwoIntervalSet E = band_endpoints(random_params(rng));
    const UniformizationData U = group_multiplier(E);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    const double x = E.b1 + u(rng) * (E.a0 - E.b1);
    return std::abs(uniformizing_coordinate(U, {x, 0.0}).w.imag());
  });
}

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const InvariantResult& r) { return r.pass; });
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["pass"] = all_pass();
  j["results"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json e{{"suite", r.suite}, {"name", r.name}, {"cases", r.cases}, {"threshold", r.threshold},
                     {"pass", r.pass}};
    if (std::isfinite(r.worst)) e["worst"] = r.worst;
    else e["worst"] = nullptr;
    j["results"].push_back(e);
  }
  return j.dump(2);
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << r.suite << ": " << r.name << "  worst=" << r.worst
       << "  threshold=" << r.threshold << "  cases=" << r.cases << '\n';
  }
  os << (all_pass() ? "all invariants hold" : "some invariants failed") << '\n';
  return os.str();
}

std::vector<std::string> verify_suites() { return {"spectral", "core", "flow", "ks", "uniformization", "all"}; }

VerifyReport run_verify(const std::string& suite, std::uint64_t seed, const NumericOptions& opt) {
  const auto names = verify_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end()) throw ValidationError("unknown suite '" + suite + "'");
  VerifyReport rep;
  rep.seed = seed;
  // Each suite gets its own stream so that running one suite alone reproduces its part of "all".
  std::uint64_t stream = 0;
  auto run = [&](const std::string& name, auto fn) {
    ++stream;
    if (suite != "all" && suite != name) return;
    Rng rng(seed + 0x9E3779B97F4A7C15ULL * stream);
    fn(rng, opt, rep.results);
  };
  run("spectral", suite_spectral);
  run("core", suite_core);
  run("flow", suite_flow);
  run("ks", suite_ks);
  run("uniformization", suite_uniformization);
  return rep;
}

}  // namespace smpflow
