#pragma once

namespace smpflow {

/// Tolerances shared across the library. Defaults are the documented
/// module defaults; the CLI exposes overrides for the first three.
struct NumericOptions {
  double tol_curve = 1e-10;     // relative to max(1, 1/a)
  double tol_inverse = 1e-11;   // padding-doubling agreement of inverse bands
  int padding = 300;            // initial padding of truncated solves
  double max_condition = 1e12;  // rejected above this condition estimate
  double absorb_tol = 1e-13;    // core entries this close to the tail are absorbed
  double tol_struct = 1e-9;     // mirror structural zeros of the inverse
};

}  // namespace smpflow
