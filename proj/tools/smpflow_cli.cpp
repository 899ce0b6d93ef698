// Command line front end over the C interface.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smpflow/smpflow.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitError = 2;

struct Failure {
  std::string message;
};

void check(smpf_status s) {
  if (s != SMPF_OK) throw Failure{std::string(smpf_status_name(s)) + ": " + smpf_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { smpf_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct OperatorDeleter {
  void operator()(smpf_operator* op) const { smpf_operator_free(op); }
};
using OperatorPtr = std::unique_ptr<smpf_operator, OperatorDeleter>;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{"cannot open " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw Failure{"cannot write " + out};
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

struct Config {
  double a = 1.0;
  double b = 0.0;
  std::optional<double> p0;
  std::optional<double> p1;
  int n = 1000;
  std::string in;
  std::string out;
  std::uint64_t seed = 1;
  std::optional<double> tol_curve;
  std::optional<double> tol_inv;
  std::optional<int> pad;
  int k = 1;
  int k_lo = -5;
  int k_hi = 5;
  std::string suite = "all";
  std::string report;
  std::string path;
  std::string endpoints;
  double closure_tol = 1e-9;
  bool krylov = false;
};

smpf_options options(const Config& c) {
  smpf_options o;
  smpf_options_default(&o);
  if (c.tol_curve) o.tol_curve = *c.tol_curve;
  if (c.tol_inv) o.tol_inverse = *c.tol_inv;
  if (c.pad) o.padding = *c.pad;
  return o;
}

// Curve point from the flags; p1 defaults to the larger root for the given p0.
std::pair<double, double> point(const Config& c) {
  if (!c.p0) throw Failure{"--p0 is required"};
  if (c.p1) return {*c.p0, *c.p1};
  double roots[2];
  int count = 0;
  check(smpf_curve_solve_p1(c.a, c.b, *c.p0, roots, &count));
  if (count == 0) throw Failure{"no curve point with p0 = " + fmt(*c.p0)};
  return {*c.p0, roots[0]};
}

OperatorPtr load(const Config& c) {
  if (c.in.empty()) throw Failure{"--in is required"};
  const std::string text = read_file(c.in);
  const smpf_options o = options(c);
  smpf_operator* op = nullptr;
  check(smpf_operator_from_json(text.c_str(), &o, &op));
  return OperatorPtr(op);
}

std::vector<std::pair<double, double>> parse_points(const std::string& s) {
  std::vector<std::pair<double, double>> pts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    try {
      if (comma == std::string::npos) pts.emplace_back(std::stod(item), 0.0);
      else pts.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Failure{"bad point '" + item + "' in --path (expected re,im;re,im;...)"};
    }
  }
  return pts;
}

int cmd_endpoints(const Config& c) {
  CString j;
  check(smpf_endpoints_json(c.a, c.b, &j.p));
  emit(j.str(), c.out);
  return kExitOk;
}

int cmd_periodic(const Config& c) {
  const auto [p0, p1] = point(c);
  const smpf_options o = options(c);
  smpf_operator* raw = nullptr;
  check(smpf_operator_periodic(c.a, c.b, p0, p1, &o, &raw));
  OperatorPtr op(raw);
  CString j;
  check(smpf_operator_to_json(op.get(), &j.p));
  emit(j.str(), c.out);
  return kExitOk;
}

int cmd_orbit(const Config& c) {
  const auto [p0, p1] = point(c);
  const smpf_options o = options(c);
  CString csv;
  int periodic = 0;
  int period = 0;
  double min_return = 0.0;
  double max_res = 0.0;
  check(smpf_orbit(c.a, c.b, p0, p1, c.n, c.closure_tol, &o, &csv.p, &periodic, &period, &min_return, &max_res));
  emit(csv.str(), c.out);
  if (periodic) std::cerr << "periodic T=" << period << '\n';
  else std::cerr << "not closed, min return d=" << fmt(min_return) << '\n';
  std::cerr << "max curve residual " << fmt(max_res) << '\n';
  return kExitOk;
}

int cmd_flow(const Config& c) {
  OperatorPtr op = load(c);
  const smpf_options o = options(c);
  smpf_operator* raw = nullptr;
  check(smpf_flow(op.get(), c.k, &o, &raw));
  OperatorPtr res(raw);
  CString j;
  check(smpf_operator_to_json(res.get(), &j.p));
  emit(j.str(), c.out);
  return kExitOk;
}

int cmd_extract(const Config& c) {
  OperatorPtr op = load(c);
  const smpf_options o = options(c);
  CString j;
  if (c.krylov) check(smpf_krylov_jacobi(op.get(), c.n, c.k_lo, c.k_hi, &j.p));
  else check(smpf_extract_jacobi(op.get(), c.k_lo, c.k_hi, &o, &j.p));
  emit(j.str(), c.out);
  return kExitOk;
}

int cmd_ks(const Config& c) {
  OperatorPtr op = load(c);
  const smpf_options o = options(c);
  CString j;
  check(smpf_ks_report(op.get(), &o, &j.p));
  emit(j.str(), c.out);
  return kExitOk;
}

int cmd_magic(const Config& c) {
  OperatorPtr op = load(c);
  const smpf_options o = options(c);
  double r = 0.0;
  check(smpf_magic_residual(op.get(), c.n, &o, &r));
  emit("{\"magic_residual\":" + fmt(r) + ",\"window\":" + std::to_string(c.n) + "}", c.out);
  return kExitOk;
}

int cmd_verify(const Config& c) {
  const smpf_options o = options(c);
  CString json;
  CString text;
  int pass = 0;
  check(smpf_verify(c.suite.c_str(), c.seed, &o, &json.p, &text.p, &pass));
  std::cout << text.str();
  if (!c.report.empty()) emit(json.str(), c.report);
  return pass ? kExitOk : kExitVerifyFailed;
}

int cmd_uniformize(const Config& c) {
  double e[4];
  if (!c.endpoints.empty()) {
    std::stringstream ss(c.endpoints);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= 4) throw Failure{"--endpoints takes four values b0,a1,b1,a0"};
      try {
        e[i++] = std::stod(item);
      } catch (const std::exception&) {
        throw Failure{"bad value '" + item + "' in --endpoints"};
      }
    }
    if (i != 4) throw Failure{"--endpoints takes four values b0,a1,b1,a0"};
  } else {
    check(smpf_band_endpoints(c.a, c.b, e));
  }
  CString j;
  check(smpf_uniformize(e, &j.p));
  std::cout << j.str() << '\n';
  if (!c.path.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "re_z,im_z,re_w,im_w\n";
    for (const auto& [x, y] : parse_points(c.path)) {
      double wr = 0.0;
      double wi = 0.0;
      check(smpf_uniformizing_coordinate(e, x, y, &wr, &wi));
      csv << x << ',' << y << ',' << wr << ',' << wi << '\n';
    }
    emit(csv.str(), c.out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi flow on SMP matrices for two-interval spectral sets"};
  app.require_subcommand(1);
  Config c;

  auto tolerances = [&](CLI::App* s) {
    s->add_option("--tol-curve", c.tol_curve, "curve residual tolerance (relative)");
    s->add_option("--tol-inv", c.tol_inv, "agreement tolerance of inverse band extraction");
    s->add_option("--pad", c.pad, "initial padding of truncated solves");
  };
  auto params = [&](CLI::App* s) {
    s->add_option("--a", c.a, "coefficient a > 0 of V(z) = a z + b - 1/z")->required();
    s->add_option("--b", c.b, "coefficient b of V")->required();
  };
  auto curve_point = [&](CLI::App* s) {
    s->add_option("--p0", c.p0, "curve point p0")->required();
    s->add_option("--p1", c.p1, "curve point p1 (default: larger root)");
  };

  auto* endpoints = app.add_subcommand("endpoints", "endpoints of E as JSON");
  params(endpoints);
  endpoints->add_option("--out", c.out);

  auto* periodic = app.add_subcommand("periodic", "period-two operator in A(E) as JSON");
  params(periodic);
  curve_point(periodic);
  periodic->add_option("--out", c.out);
  tolerances(periodic);

  auto* orbit = app.add_subcommand("orbit", "orbit of the curve map as CSV, closure diagnosis on stderr");
  params(orbit);
  curve_point(orbit);
  orbit->add_option("--n", c.n, "number of steps");
  orbit->add_option("--closure-tol", c.closure_tol);
  orbit->add_option("--out", c.out);
  tolerances(orbit);

  auto* flow = app.add_subcommand("flow", "apply k flow steps (negative k: inverse flow)");
  flow->add_option("--in", c.in)->required();
  flow->add_option("--k", c.k);
  flow->add_option("--out", c.out);
  tolerances(flow);

  auto* extract = app.add_subcommand("extract-jacobi", "Jacobi coefficients a_k, b_k on [k-lo, k-hi]");
  extract->add_option("--in", c.in)->required();
  extract->add_option("--k-lo", c.k_lo);
  extract->add_option("--k-hi", c.k_hi);
  extract->add_flag("--krylov", c.krylov, "use the dense Krylov oracle instead of the flow");
  extract->add_option("--n", c.n, "truncation size of the Krylov oracle");
  extract->add_option("--out", c.out);
  tolerances(extract);

  auto* ks = app.add_subcommand("ks", "Killip-Simon functional report");
  ks->add_option("--in", c.in)->required();
  ks->add_option("--out", c.out);
  tolerances(ks);

  auto* magic = app.add_subcommand("magic", "magic formula residual");
  magic->add_option("--in", c.in)->required();
  magic->add_option("--n", c.n, "window size");
  magic->add_option("--out", c.out);
  tolerances(magic);

  auto* verify = app.add_subcommand("verify", "randomized invariant suites");
  verify->add_option("--suite", c.suite)->check(CLI::IsMember({"spectral", "core", "flow", "ks", "uniformization", "all"}));
  verify->add_option("--seed", c.seed);
  verify->add_option("--report", c.report, "write the JSON report here");
  tolerances(verify);

  auto* uniformize = app.add_subcommand("uniformize", "group multiplier rho and w(z) along points");
  uniformize->add_option("--a", c.a);
  uniformize->add_option("--b", c.b);
  uniformize->add_option("--endpoints", c.endpoints, "b0,a1,b1,a0 (overrides --a/--b)");
  uniformize->add_option("--path", c.path, "points re,im;re,im;... in the closed upper half-plane");
  uniformize->add_option("--out", c.out, "CSV of w along the path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  // CLI11 leaves n at its default when not given; magic uses a 400 window by default.
  if (magic->parsed() && magic->count("--n") == 0) c.n = 400;
  if (extract->parsed() && extract->count("--n") == 0) c.n = 400;

  try {
    if (endpoints->parsed()) return cmd_endpoints(c);
    if (periodic->parsed()) return cmd_periodic(c);
    if (orbit->parsed()) return cmd_orbit(c);
    if (flow->parsed()) return cmd_flow(c);
    if (extract->parsed()) return cmd_extract(c);
    if (ks->parsed()) return cmd_ks(c);
    if (magic->parsed()) return cmd_magic(c);
    if (verify->parsed()) return cmd_verify(c);
    if (uniformize->parsed()) return cmd_uniformize(c);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return kExitError;
  }
  return kExitError;
}
