#include "smpflow/smpflow.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "smpflow/error.hpp"
#include "smpflow/jacobi_flow.hpp"
#include "smpflow/ks_functional.hpp"
#include "smpflow/periodic.hpp"
#include "smpflow/serialization.hpp"
#include "smpflow/smp_operator.hpp"
#include "smpflow/uniformization.hpp"
#include "smpflow/verify.hpp"

struct smpf_operator {
  smpflow::SmpOperator op;
};

namespace {

thread_local std::string g_last_error;

smpf_status status_of(smpflow::ErrorKind k) {
  switch (k) {
    case smpflow::ErrorKind::Validation:
      return SMPF_ERR_VALIDATION;
    case smpflow::ErrorKind::Domain:
      return SMPF_ERR_DOMAIN;
    case smpflow::ErrorKind::Singular:
      return SMPF_ERR_SINGULAR;
    case smpflow::ErrorKind::Convergence:
      return SMPF_ERR_CONVERGENCE;
    case smpflow::ErrorKind::Structure:
      return SMPF_ERR_STRUCTURE;
  }
  return SMPF_ERR_INTERNAL;
}

template <class F>
smpf_status guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return SMPF_OK;
  } catch (const smpflow::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SMPF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SMPF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SMPF_ERR_INTERNAL;
  }
}

smpf_status null_arg(const char* name) {
  g_last_error = std::string("null argument: ") + name;
  return SMPF_ERR_NULL;
}

#define SMPF_REQUIRE(ptr) \
  do {                    \
    if (!(ptr)) return null_arg(#ptr); \
  } while (0)

smpflow::NumericOptions options_of(const smpf_options* o) {
  smpflow::NumericOptions n;
  if (!o) return n;
  n.tol_curve = o->tol_curve;
  n.tol_inverse = o->tol_inverse;
  n.padding = o->padding;
  n.max_condition = o->max_condition;
  n.absorb_tol = o->absorb_tol;
  n.tol_struct = o->tol_struct;
  return n;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

smpflow::TwoIntervalSet set_of(const double e[4]) {
  smpflow::TwoIntervalSet E{e[0], e[1], e[2], e[3]};
  E.validate();
  return E;
}

}  // namespace

extern "C" {

void smpf_options_default(smpf_options* opt) {
  if (!opt) return;
  const smpflow::NumericOptions n;
  *opt = {n.tol_curve, n.tol_inverse, n.padding, n.max_condition, n.absorb_tol, n.tol_struct};
}

const char* smpf_last_error(void) { return g_last_error.c_str(); }

const char* smpf_status_name(smpf_status status) {
  switch (status) {
    case SMPF_OK:
      return "ok";
    case SMPF_ERR_VALIDATION:
      return "validation error";
    case SMPF_ERR_DOMAIN:
      return "domain error";
    case SMPF_ERR_SINGULAR:
      return "singular system";
    case SMPF_ERR_CONVERGENCE:
      return "no convergence";
    case SMPF_ERR_STRUCTURE:
      return "structure violation";
    case SMPF_ERR_NULL:
      return "null argument";
    case SMPF_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void smpf_string_free(char* s) { std::free(s); }

smpf_status smpf_band_endpoints(double a, double b, double endpoints[4]) {
  SMPF_REQUIRE(endpoints);
  return guard([&] {
    const auto E = smpflow::band_endpoints(smpflow::CurveParams(a, b));
    endpoints[0] = E.b0;
    endpoints[1] = E.a1;
    endpoints[2] = E.b1;
    endpoints[3] = E.a0;
  });
}

smpf_status smpf_endpoints_json(double a, double b, char** json) {
  SMPF_REQUIRE(json);
  return guard([&] { *json = dup_string(smpflow::to_json(smpflow::band_endpoints(smpflow::CurveParams(a, b)))); });
}

smpf_status smpf_delta_eval(double a, double b, double z_re, double z_im, double* d_re, double* d_im) {
  SMPF_REQUIRE(d_re);
  SMPF_REQUIRE(d_im);
  return guard([&] {
    const auto d = smpflow::delta_eval(smpflow::CurveParams(a, b), {z_re, z_im});
    *d_re = d.real();
    *d_im = d.imag();
  });
}

smpf_status smpf_curve_residual(double a, double b, double p0, double p1, double* residual) {
  SMPF_REQUIRE(residual);
  return guard([&] { *residual = smpflow::curve_residual(smpflow::CurveParams(a, b), {p0, p1}); });
}

smpf_status smpf_curve_solve_p1(double a, double b, double p0, double roots[2], int* count) {
  SMPF_REQUIRE(roots);
  SMPF_REQUIRE(count);
  return guard([&] {
    const auto r = smpflow::curve_solve_p1(smpflow::CurveParams(a, b), p0);
    *count = static_cast<int>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) roots[i] = r[i];
  });
}

smpf_status smpf_curve_flow_map(double a, double b, double p0, double p1, const smpf_options* opt, double out[2]) {
  SMPF_REQUIRE(out);
  return guard([&] {
    const auto q = smpflow::curve_flow_map(smpflow::CurveParams(a, b), {p0, p1}, options_of(opt).tol_curve);
    out[0] = q.p0;
    out[1] = q.p1;
  });
}

smpf_status smpf_curve_flow_map_inverse(double a, double b, double p0, double p1, const smpf_options* opt,
                                        double out[2]) {
  SMPF_REQUIRE(out);
  return guard([&] {
    const auto q = smpflow::curve_flow_map_inverse(smpflow::CurveParams(a, b), {p0, p1}, options_of(opt).tol_curve);
    out[0] = q.p0;
    out[1] = q.p1;
  });
}

smpf_status smpf_orbit(double a, double b, double p0, double p1, int n, double closure_tol, const smpf_options* opt,
                       char** csv, int* periodic, int* period, double* min_return_distance, double* max_residual) {
  return guard([&] {
    const auto o = smpflow::orbit(smpflow::CurveParams(a, b), {p0, p1}, n, closure_tol, options_of(opt).tol_curve);
    if (periodic) *periodic = o.periodic ? 1 : 0;
    if (period) *period = o.period;
    if (min_return_distance) *min_return_distance = o.min_return_distance;
    if (max_residual) *max_residual = o.max_residual();
    if (csv) *csv = dup_string(smpflow::orbit_csv(o));
  });
}

smpf_status smpf_operator_periodic(double a, double b, double p0, double p1, const smpf_options* opt,
                                   smpf_operator** out) {
  SMPF_REQUIRE(out);
  return guard([&] {
    *out = new smpf_operator{smpflow::build_periodic_smp(smpflow::CurveParams(a, b), {p0, p1}, options_of(opt))};
  });
}

smpf_status smpf_operator_from_json(const char* json, const smpf_options* opt, smpf_operator** out) {
  SMPF_REQUIRE(json);
  SMPF_REQUIRE(out);
  return guard([&] { *out = new smpf_operator{smpflow::operator_from_json(json, options_of(opt).tol_curve)}; });
}

smpf_status smpf_operator_to_json(const smpf_operator* op, char** json) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(json);
  return guard([&] { *json = dup_string(smpflow::to_json(op->op)); });
}

void smpf_operator_free(smpf_operator* op) { delete op; }

smpf_status smpf_operator_window(const smpf_operator* op, int* k_min, int* k_max) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(k_min);
  SMPF_REQUIRE(k_max);
  *k_min = op->op.k_min();
  *k_max = op->op.k_max();
  return SMPF_OK;
}

smpf_status smpf_operator_coefficients(const smpf_operator* op, int k, double* p, double* q, double* r) {
  SMPF_REQUIRE(op);
  return guard([&] {
    if (p) *p = op->op.p(k);
    if (q) *q = op->op.q(k);
    if (r && k % 2 != 0) *r = op->op.r(k);
  });
}

smpf_status smpf_flow(const smpf_operator* op, int k, const smpf_options* opt, smpf_operator** out) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(out);
  return guard([&] { *out = new smpf_operator{smpflow::flow_iterate(op->op, k, options_of(opt))}; });
}

smpf_status smpf_tau(const smpf_operator* op, const smpf_options* opt, smpf_operator** out) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(out);
  return guard([&] { *out = new smpf_operator{smpflow::tau_involution(op->op, options_of(opt))}; });
}

smpf_status smpf_magic_residual(const smpf_operator* op, int n, const smpf_options* opt, double* residual) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(residual);
  return guard([&] { *residual = smpflow::magic_residual(op->op, op->op.curve(), n, options_of(opt)); });
}

smpf_status smpf_cyclicity_deficit(const smpf_operator* op, int n, int* deficit) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(deficit);
  return guard([&] { *deficit = smpflow::cyclicity_check(op->op, n).deficit(); });
}

smpf_status smpf_extract_jacobi(const smpf_operator* op, int k_lo, int k_hi, const smpf_options* opt, char** json) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(json);
  return guard([&] { *json = dup_string(smpflow::to_json(smpflow::extract_jacobi(op->op, k_lo, k_hi, options_of(opt)))); });
}

smpf_status smpf_krylov_jacobi(const smpf_operator* op, int n, int k_lo, int k_hi, char** json) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(json);
  return guard([&] { *json = dup_string(smpflow::to_json(smpflow::krylov_jacobi_oracle(op->op, n, k_lo, k_hi).jacobi)); });
}

smpf_status smpf_periodic_jacobi(double a, double b, double p0, double p1, int n_lo, int n_hi, const smpf_options* opt,
                                 char** json) {
  SMPF_REQUIRE(json);
  return guard([&] {
    *json = dup_string(smpflow::to_json(
        smpflow::periodic_jacobi_coeffs(smpflow::CurveParams(a, b), {p0, p1}, n_lo, n_hi, options_of(opt).tol_curve)));
  });
}

smpf_status smpf_ks_report(const smpf_operator* op, const smpf_options* opt, char** json) {
  SMPF_REQUIRE(op);
  SMPF_REQUIRE(json);
  return guard([&] { *json = dup_string(smpflow::to_json(smpflow::ks_report(op->op, options_of(opt)))); });
}

smpf_status smpf_verify(const char* suite, uint64_t seed, const smpf_options* opt, char** report_json,
                        char** report_text, int* all_pass) {
  SMPF_REQUIRE(suite);
  return guard([&] {
    const auto rep = smpflow::run_verify(suite, seed, options_of(opt));
    if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
    if (report_json) *report_json = dup_string(rep.to_json());
    if (report_text) *report_text = dup_string(rep.to_text());
  });
}

smpf_status smpf_uniformize(const double endpoints[4], char** json) {
  SMPF_REQUIRE(endpoints);
  SMPF_REQUIRE(json);
  return guard([&] { *json = dup_string(smpflow::to_json(smpflow::group_multiplier(set_of(endpoints)))); });
}

smpf_status smpf_uniformizing_coordinate(const double endpoints[4], double z_re, double z_im, double* w_re,
                                         double* w_im) {
  SMPF_REQUIRE(endpoints);
  SMPF_REQUIRE(w_re);
  SMPF_REQUIRE(w_im);
  return guard([&] {
    const auto U = smpflow::group_multiplier(set_of(endpoints));
    const auto w = smpflow::uniformizing_coordinate(U, {z_re, z_im}).w;
    *w_re = w.real();
    *w_im = w.imag();
  });
}

}  // extern "C"
