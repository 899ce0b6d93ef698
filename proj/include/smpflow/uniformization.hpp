#pragma once

#include <complex>
#include <vector>

#include "smpflow/spectral.hpp"

namespace smpflow {

/// Composite Gauss-Legendre value with the change seen at the last step halving.
struct QuadratureResult {
  double value = 0.0;
  double last_change = 0.0;  // relative
  int refinements = 0;
};

struct UniformizationData {
  TwoIntervalSet E{};
  double rho = 0.0;
  double I_num = 0.0;  // over the band [b1, a0]
  double I_den = 0.0;  // over [b0, a0], gap included
  double quadrature_change = 0.0;
};

/// Integral of |(x - b0)(x - a1)(x - b1)(x - a0)|^{-1/2} over [lo, hi], where lo and hi
/// are endpoints of E or lie between them. Branch points are absorbed by x = e +- t^2.
QuadratureResult quartic_integral(const TwoIntervalSet& E, double lo, double hi);

/// rho = exp(2 pi I_num / I_den). With use_left_band the numerator runs over [b0, a1].
UniformizationData group_multiplier(const TwoIntervalSet& E, bool use_left_band = false);

/// Integration path from a0 to z used by uniformizing_coordinate: a straight segment,
/// or a tent through the upper half-plane when z is real and at most b1.
std::vector<std::complex<double>> default_path(const TwoIntervalSet& E, std::complex<double> z);

struct CoordinateResult {
  std::complex<double> w;
  std::complex<double> integral;  // int_{a0}^{z} dz / sqrt(Q)
  double quadrature_change = 0.0;
};

/// w(z) = exp(i pi I(z) / I_den) along the polygonal path (first vertex a0). The square
/// root is the product of principal roots of (z - e), with the upper-half-plane limit
/// on the real axis; it is positive for real z > a0.
CoordinateResult uniformizing_coordinate_along(const UniformizationData& U,
                                               const std::vector<std::complex<double>>& path);
CoordinateResult uniformizing_coordinate(const UniformizationData& U, std::complex<double> z);

}  // namespace smpflow
