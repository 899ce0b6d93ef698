/* C interface to the smpflow library. Every call returns an smpf_status; on
 * failure smpf_last_error() describes the problem (thread local, valid until
 * the next call on the same thread). Strings returned through char** are
 * heap allocated and must be released with smpf_string_free. */
#ifndef SMPFLOW_H
#define SMPFLOW_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(SMPF_BUILDING_LIBRARY)
#define SMPF_API __declspec(dllexport)
#else
#define SMPF_API __declspec(dllimport)
#endif
#else
#define SMPF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smpf_status {
  SMPF_OK = 0,
  SMPF_ERR_VALIDATION = 1,  /* input violates an invariant */
  SMPF_ERR_DOMAIN = 2,      /* evaluation outside the domain */
  SMPF_ERR_SINGULAR = 3,    /* singular or badly conditioned solve */
  SMPF_ERR_CONVERGENCE = 4, /* iteration or quadrature did not settle */
  SMPF_ERR_STRUCTURE = 5,   /* operator left the SMP class */
  SMPF_ERR_NULL = 6,        /* null argument */
  SMPF_ERR_INTERNAL = 7
} smpf_status;

typedef struct smpf_operator smpf_operator;

typedef struct smpf_options {
  double tol_curve;
  double tol_inverse;
  int padding;
  double max_condition;
  double absorb_tol;
  double tol_struct;
} smpf_options;

SMPF_API void smpf_options_default(smpf_options* opt);
SMPF_API const char* smpf_last_error(void);
SMPF_API const char* smpf_status_name(smpf_status status);
SMPF_API void smpf_string_free(char* s);

/* Spectral set and curve. endpoints = {b0, a1, b1, a0}. */
SMPF_API smpf_status smpf_band_endpoints(double a, double b, double endpoints[4]);
SMPF_API smpf_status smpf_endpoints_json(double a, double b, char** json);
SMPF_API smpf_status smpf_delta_eval(double a, double b, double z_re, double z_im, double* d_re, double* d_im);
SMPF_API smpf_status smpf_curve_residual(double a, double b, double p0, double p1, double* residual);
/* Writes up to two roots in decreasing order and their number. */
SMPF_API smpf_status smpf_curve_solve_p1(double a, double b, double p0, double roots[2], int* count);
SMPF_API smpf_status smpf_curve_flow_map(double a, double b, double p0, double p1, const smpf_options* opt,
                                         double out[2]);
SMPF_API smpf_status smpf_curve_flow_map_inverse(double a, double b, double p0, double p1, const smpf_options* opt,
                                                 double out[2]);

/* Orbit of n steps: CSV (n,p0,p1,residual) and closure diagnosis. Any output pointer may be null. */
SMPF_API smpf_status smpf_orbit(double a, double b, double p0, double p1, int n, double closure_tol,
                                const smpf_options* opt, char** csv, int* periodic, int* period,
                                double* min_return_distance, double* max_residual);

/* Operators. */
SMPF_API smpf_status smpf_operator_periodic(double a, double b, double p0, double p1, const smpf_options* opt,
                                            smpf_operator** out);
SMPF_API smpf_status smpf_operator_from_json(const char* json, const smpf_options* opt, smpf_operator** out);
SMPF_API smpf_status smpf_operator_to_json(const smpf_operator* op, char** json);
SMPF_API void smpf_operator_free(smpf_operator* op);
SMPF_API smpf_status smpf_operator_window(const smpf_operator* op, int* k_min, int* k_max);
/* r is written only for odd k. */
SMPF_API smpf_status smpf_operator_coefficients(const smpf_operator* op, int k, double* p, double* q, double* r);

/* k steps of the flow, negative k runs the inverse flow. */
SMPF_API smpf_status smpf_flow(const smpf_operator* op, int k, const smpf_options* opt, smpf_operator** out);
SMPF_API smpf_status smpf_tau(const smpf_operator* op, const smpf_options* opt, smpf_operator** out);
SMPF_API smpf_status smpf_magic_residual(const smpf_operator* op, int n, const smpf_options* opt, double* residual);
SMPF_API smpf_status smpf_cyclicity_deficit(const smpf_operator* op, int n, int* deficit);

/* Jacobi coefficients as {"k_min","a","b"} JSON. */
SMPF_API smpf_status smpf_extract_jacobi(const smpf_operator* op, int k_lo, int k_hi, const smpf_options* opt,
                                         char** json);
SMPF_API smpf_status smpf_krylov_jacobi(const smpf_operator* op, int n, int k_lo, int k_hi, char** json);
SMPF_API smpf_status smpf_periodic_jacobi(double a, double b, double p0, double p1, int n_lo, int n_hi,
                                          const smpf_options* opt, char** json);

/* {"H","H_plus","delta","main_lemma_residual","window"} */
SMPF_API smpf_status smpf_ks_report(const smpf_operator* op, const smpf_options* opt, char** json);

/* Randomized invariant suites; report is JSON, all_pass is 0 or 1. */
SMPF_API smpf_status smpf_verify(const char* suite, uint64_t seed, const smpf_options* opt, char** report_json,
                                 char** report_text, int* all_pass);

/* {"rho","I_num","I_den"} for E = [b0, a0] minus (a1, b1). */
SMPF_API smpf_status smpf_uniformize(const double endpoints[4], char** json);
SMPF_API smpf_status smpf_uniformizing_coordinate(const double endpoints[4], double z_re, double z_im, double* w_re,
                                                  double* w_im);

#ifdef __cplusplus
}
#endif

#endif
