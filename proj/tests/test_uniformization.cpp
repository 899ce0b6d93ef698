#include <doctest.h>

#include <cmath>
#include <complex>

#include "smpflow/error.hpp"
#include "smpflow/uniformization.hpp"

using namespace smpflow;
using cd = std::complex<double>;

// Reference values from 30-digit mpmath quadrature.
TEST_SUITE("uniformization") {
  TEST_CASE("rho against high precision values") {
    struct Ref {
      double a, b, I_num, I_den, rho;
    };
    const Ref refs[] = {
        {1.0, 0.0, 1.3110287771460598922, 3.9330863314381796777, 8.1205273966697763108},
        {2.0, 1.0, 1.94785756533328408, 6.2596470424373008933, 7.0652056896181227344},
        {0.5, -3.0, 0.5391289118749108031, 1.9211330011561196198, 5.8313861483349505154},
    };
    for (const auto& r : refs) {
      const UniformizationData U = group_multiplier(band_endpoints(CurveParams(r.a, r.b)));
      CHECK(U.I_num == doctest::Approx(r.I_num).epsilon(1e-12));
      CHECK(U.I_den == doctest::Approx(r.I_den).epsilon(1e-12));
      CHECK(U.rho == doctest::Approx(r.rho).epsilon(1e-11));
      CHECK(U.rho > 1.0);
      CHECK(U.quadrature_change <= 1e-10);
    }
  }

  TEST_CASE("affine invariance") {
    const TwoIntervalSet E = band_endpoints(CurveParams(1, 0));
    const TwoIntervalSet F{2 * E.b0 + 3, 2 * E.a1 + 3, 2 * E.b1 + 3, 2 * E.a0 + 3};
    CHECK(std::abs(group_multiplier(F).rho / group_multiplier(E).rho - 1) <= 1e-8);
  }

  TEST_CASE("symmetric set gives the same rho from either band") {
    const TwoIntervalSet E = band_endpoints(CurveParams(1, 0));
    CHECK(std::abs(group_multiplier(E, true).rho - group_multiplier(E).rho) <= 1e-9);
  }

  TEST_CASE("log rho is monotone in the inner gap") {
    // Shrink the gap (a1, b1) = (-g, g) inside fixed outer ends.
    double prev = -INFINITY;
    for (double g : {0.5, 0.3, 0.1, 0.03, 0.01, 0.003}) {
      const UniformizationData U = group_multiplier({-2.0, -g, g, 2.0});
      const double l = std::log(U.rho);
      CHECK(l > prev);
      prev = l;
    }
  }

  TEST_CASE("w at the base point and on the right band") {
    const UniformizationData U = group_multiplier(band_endpoints(CurveParams(1, 0)));
    CHECK(uniformizing_coordinate(U, cd(U.E.a0, 0)).w == cd(1, 0));
    for (double t : {0.05, 0.3, 0.6, 0.95}) {
      const cd w = uniformizing_coordinate(U, cd(U.E.b1 + t * (U.E.a0 - U.E.b1), 0)).w;
      CHECK(std::abs(w.imag()) <= 1e-8);
      CHECK(w.real() > 0.0);
    }
    const cd w = uniformizing_coordinate(U, cd(1.5, 0)).w;
    CHECK(w.real() == doctest::Approx(0.69999475948923618694).epsilon(1e-12));
  }

  TEST_CASE("w against a high precision value") {
    const UniformizationData U = group_multiplier(band_endpoints(CurveParams(1, 0)));
    const cd w = uniformizing_coordinate(U, cd(0.5, 0.5)).w;
    CHECK(std::abs(w - cd(0.5063268019825564032, 0.15496106117479250432)) <= 1e-12);
  }

  TEST_CASE("path independence in the upper half-plane") {
    const UniformizationData U = group_multiplier(band_endpoints(CurveParams(1.4, -0.7)));
    for (cd z : {cd(0.2, 0.4), cd(-1.0, 0.3), cd(3.0, 2.0), cd(-0.1, 0.0)}) {
      const cd direct = uniformizing_coordinate(U, z).w;
      const std::vector<cd> detour{cd(U.E.a0, 0), cd(U.E.a0 + 1, 1.5), cd(-4, 2.5), z};
      const cd around = uniformizing_coordinate_along(U, detour).w;
      CHECK(std::abs(direct - around) <= 1e-9);
    }
  }

  TEST_CASE("path guards") {
    const UniformizationData U = group_multiplier(band_endpoints(CurveParams(1, 0)));
    CHECK_THROWS_AS(uniformizing_coordinate(U, cd(U.E.b1, 0)), DomainError);
    CHECK_THROWS_AS(uniformizing_coordinate(U, cd(0.3, -0.1)), ValidationError);
    CHECK_THROWS_AS(uniformizing_coordinate_along(U, {cd(0, 1), cd(1, 1)}), ValidationError);
    CHECK_THROWS_AS(quartic_integral(U.E, 1.0, 0.5), ValidationError);
  }

  TEST_CASE("step halving") {
    const TwoIntervalSet E = band_endpoints(CurveParams(3.0, 2.5));
    const QuadratureResult q = quartic_integral(E, E.b0, E.a0);
    CHECK(q.last_change <= 1e-10);
    CHECK(q.refinements <= 20);
  }
}
