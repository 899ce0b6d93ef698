#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "smpflow/error.hpp"
#include "smpflow/periodic.hpp"
#include "smpflow/sampling.hpp"
#include "smpflow/serialization.hpp"
#include "smpflow/smp_operator.hpp"

using namespace smpflow;

namespace {

std::map<int, double> as_map(const SparseColumn& c) {
  std::map<int, double> m;
  for (const auto& e : c) m[e.row] = e.value;
  return m;
}

}  // namespace

TEST_SUITE("smp-core") {
  TEST_CASE("columns of A(1, 0)") {
    const SmpOperator A = build_periodic_smp(CurveParams(1, 0), {1, 0});
    CHECK(as_map(column(A, 0)) == std::map<int, double>{{-1, 1.0}, {0, 0.0}, {1, 0.0}});
    CHECK(as_map(column(A, 1)) == std::map<int, double>{{-1, 1.0}, {0, 0.0}, {1, 0.0}, {2, 1.0}, {3, 1.0}});
  }

  TEST_CASE("columns are symmetric") {
    Rng rng(3);
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng);
    std::uniform_int_distribution<int> u(-25, 25);
    for (int t = 0; t < 100; ++t) {
      const int i = u(rng);
      const int j = i + u(rng) % 3;
      const auto ci = as_map(column(A, i));
      const auto cj = as_map(column(A, j));
      const double x = ci.count(j) ? ci.at(j) : 0.0;
      const double y = cj.count(i) ? cj.at(i) : 0.0;
      CHECK(x == y);
    }
  }

  TEST_CASE("constructor validation") {
    const CurveParams c(1, 0);
    CHECK_THROWS_AS(SmpOperator(c, {1, 0}, {1, 0}, SmpCore{1, {1, 0}, {0}, {1}}), ValidationError);
    CHECK_THROWS_AS(SmpOperator(c, {1, 0}, {1, 0}, SmpCore{0, {1, 0, 1}, {0}, {1}}), ValidationError);
    CHECK_THROWS_AS(SmpOperator(c, {1, 0}, {1, 0}, SmpCore{0, {1, 0}, {0}, {0.0}}), StructureError);
    CHECK_THROWS_AS(SmpOperator(c, {1, 1}, {1, 0}, SmpCore{}), ValidationError);
    CHECK_THROWS_AS(SmpOperator(c, {1, 0}, {1, 0}, SmpCore{0, {2e6, 0}, {0}, {1}}), ValidationError);
    CHECK_THROWS_AS(build_periodic_smp(c, {1, 0}).r(2), ValidationError);
  }

  TEST_CASE("apply matches columns and the dense product") {
    Rng rng(8);
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng);
    const IndexedVector e0 = IndexedVector::unit(-4, 4, 0);
    const IndexedVector y = apply(A, e0);
    for (const auto& [row, v] : as_map(column(A, 0))) CHECK(y.at(row) == v);

    std::uniform_real_distribution<double> u(-1, 1);
    IndexedVector x = IndexedVector::zeros(-100, 99);
    IndexedVector z = IndexedVector::zeros(-100, 99);
    for (auto& v : x.values) v = u(rng);
    for (auto& v : z.values) v = u(rng);
    const auto D = oracle::dense(A, -100, 99);
    Eigen::VectorXd xv = Eigen::Map<Eigen::VectorXd>(x.values.data(), 200);
    const Eigen::VectorXd dx = D.M * xv;
    const IndexedVector ax = apply(A, x);
    for (int i = -50; i < 50; ++i) CHECK(std::abs(ax.at(i) - dx(i + 100)) <= 1e-14);

    const double alpha = 0.7;
    const double beta = -1.3;
    IndexedVector w = IndexedVector::zeros(-100, 99);
    for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = alpha * x.values[i] + beta * z.values[i];
    const IndexedVector aw = apply(A, w);
    const IndexedVector az = apply(A, z);
    for (int i = aw.lo; i <= aw.hi(); ++i) CHECK(std::abs(aw.at(i) - alpha * ax.at(i) - beta * az.at(i)) <= 1e-13);
  }

  TEST_CASE("dense truncation structure") {
    Rng rng(12);
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng);
    const Eigen::MatrixXd M = dense_truncation(A, -30, 31);
    CHECK((M - M.transpose()).norm() == 0.0);
    for (int i = 0; i < M.rows(); ++i)
      for (int j = 0; j < M.cols(); ++j)
        if (std::abs(i - j) > 2) CHECK(M(i, j) == 0.0);
    for (int n = -14; n <= 14; ++n) {
      CHECK(M(2 * n + 30, 2 * n + 2 + 30) == 0.0);
      CHECK(M(2 * n - 1 + 30, 2 * n + 1 + 30) == A.r(2 * n + 1));
      CHECK(A.r(2 * n + 1) != 0.0);
    }
    CHECK_THROWS_AS(dense_truncation(A, 3, 3), ValidationError);
  }

  TEST_CASE("inverse bands of A(E) follow the magic formula") {
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
      const CurveParams c = random_params(rng);
      const SmpOperator A = build_periodic_smp(c, random_curve_point(c, rng));
      const InverseBands inv = inverse_band_entries(A, -10, 10);
      for (int k = -10; k <= 10; ++k) {
        if (k % 2 == 0) CHECK(std::abs(inv.rho(k) + 1.0) <= 1e-10);
        else CHECK(std::abs(inv.outer_at(k)) <= 1e-10);
        CHECK(std::abs(inv.pi(k) - c.a() * A.p(k)) <= 1e-10);
        CHECK(std::abs(inv.sigma(k) - (c.a() * A.q(k) + c.b())) <= 1e-10);
      }
    }
  }

  TEST_CASE("inverse bands agree with a dense inverse and invert A") {
    Rng rng(14);
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng);
    const InverseBands inv = inverse_band_entries(A, -20, 20);
    const auto D = oracle::dense_inverse(A, -20, 20);
    for (int k = -20; k <= 20; ++k) {
      CHECK(std::abs(inv.sigma(k) - D.at(k, k)) <= 1e-10);
      CHECK(std::abs(inv.pi(k) - D.at(k - 1, k)) <= 1e-10);
      CHECK(std::abs(inv.outer_at(k) - D.at(k - 2, k)) <= 1e-10);
    }
    // Row k of A times column k of A^{-1} restricted to the band: the inverse is
    // pentadiagonal, so the band product is the full product.
    for (int k = -16; k <= 16; ++k) {
      double s = 0.0;
      for (int j = k - 2; j <= k + 2; ++j) s += A.entry(k, j) * D.at(j, k);
      CHECK(std::abs(s - 1.0) <= 1e-10);
    }
    CHECK(inv.max_structural_zero <= 1e-10);
    CHECK(inv.max_off_band <= 1e-10);
    CHECK(inv.max_asymmetry <= 1e-10);
  }

  TEST_CASE("inverse bands decay to the periodic values") {
    Rng rng(15);
    const CurveParams c(1.2, 0.4);
    const SmpOperator A = random_eventually_periodic(c, rng, {4, 0.3, false});
    const InverseBands inv = inverse_band_entries(A, A.k_max() + 1, A.k_max() + 40);
    std::vector<double> dev;
    for (int k = A.k_max() + 1; k <= A.k_max() + 40; k += 2) {
      dev.push_back(std::abs(inv.sigma(k) - (c.a() * A.q(k) + c.b())));
    }
    // Once past the two rows touched by the core the deviation is exactly periodic zero.
    for (std::size_t i = 2; i < dev.size(); ++i) CHECK(dev[i] <= 1e-10);
  }

  TEST_CASE("singular truncation is reported") {
    // 0 in the spectrum: q = 0 everywhere with vanishing p makes A^{-1} blow up.
    const CurveParams c(1, 0);
    SmpCore core{0, {0, 0}, {0}, {1}};
    const SmpOperator A(c, {1, 0}, {1, 0}, core);
    CHECK_THROWS_AS(inverse_band_entries(A, -4, 4), SingularError);
  }

  TEST_CASE("tau of A(E) has r = 1 and the reflected tails") {
    Rng rng(16);
    for (int t = 0; t < 5; ++t) {
      const CurveParams c = random_params(rng);
      const CurvePoint p = random_curve_point(c, rng);
      const SmpOperator T = tau_involution(build_periodic_smp(c, p));
      CHECK(std::abs(T.r(1) - 1.0) <= 1e-10);
      CHECK(std::abs(T.r(-7) - 1.0) <= 1e-10);
      CHECK(T.scale() == doctest::Approx(c.a()));
      CHECK(T.right_tail() == CurvePoint{-p.p1, -p.p0});
      // tau A is SMP structured again: its inverse has the mirror zeros.
      const InverseBands inv = inverse_band_entries(T, -10, 10);
      CHECK(inv.max_structural_zero <= 1e-10);
      CHECK(magic_residual(T, c, 100) <= 1e-10);
    }
  }

  TEST_CASE("tau squares to the even shift") {
    Rng rng(17);
    for (int t = 0; t < 10; ++t) {
      const CurveParams c = random_params(rng);
      const SmpOperator A = random_eventually_periodic(c, rng);
      const SmpOperator B = tau_involution(tau_involution(A));
      CHECK(coefficient_distance(B, A.shifted(-1), A.k_min() - 12, A.k_max() + 12) <= 1e-9);
      CHECK(B.scale() == 1.0);
    }
  }

  TEST_CASE("tilde e0") {
    const CurveParams c(1, 0);
    const SmpOperator A = build_periodic_smp(c, {0, 1});
    const TildeE0 t = tilde_e0(A);
    CHECK(t.c0 == 0.0);
    CHECK(t.c1 == 1.0);
    CHECK(t.a0 == 1.0);

    const SmpOperator B(c, {1, 0}, {1, 0}, SmpCore{0, {1, 0}, {0}, {1}});
    const TildeE0 s = tilde_e0(B);
    CHECK(s.a0 == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.c0 == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(s.c1 == doctest::Approx(1 / std::sqrt(2.0)));

    Rng rng(18);
    for (int i = 0; i < 20; ++i) {
      const CurveParams d = random_params(rng);
      const TildeE0 u = tilde_e0(random_eventually_periodic(d, rng));
      CHECK(std::abs(std::hypot(u.c0, u.c1) - 1.0) <= 1e-15);
    }
  }

  TEST_CASE("cyclicity of e_{-1}, tilde e_0") {
    const CurveParams c(1, 0);
    // A(1, 0) has p_1 = 0, hence pi_{-1} = a p_{-1} = 0: the degenerate branch.
    CHECK(cyclicity_check(build_periodic_smp(c, {1, 0}), 60).deficit() == 0);
    CHECK(cyclicity_check(build_periodic_smp(c, {0, 1}), 60).deficit() == 0);
    const CurveParams d(0.8, 1.1);
    CHECK(cyclicity_check(build_periodic_smp(d, {0.4, curve_solve_p1(d, 0.4)[0]}), 60).deficit() == 0);
    Rng rng(19);
    for (int t = 0; t < 3; ++t) {
      const CurveParams e = random_params(rng, 0.5, 2.0, -2.0, 2.0);
      const CyclicityReport r = cyclicity_check(random_eventually_periodic(e, rng), 60);
      CHECK(r.deficit() == 0);
      CHECK(r.interior_dimension == 121 - 8);
    }
  }

  TEST_CASE("canonical form absorbs tail blocks") {
    const CurveParams c(1, 0);
    const SmpOperator A = build_periodic_smp(c, {1, 0});
    const SmpOperator W = A.expanded(-6, 7);
    CHECK(W.k_min() == -6);
    CHECK(W.k_max() == 7);
    CHECK(coefficient_distance(W, A, -20, 20) == 0.0);
    const SmpOperator C = W.canonical();
    CHECK(C.core().empty());
    CHECK(coefficient_distance(C, A, -20, 20) == 0.0);
  }

  TEST_CASE("shift moves coefficients by two") {
    Rng rng(20);
    const CurveParams c = random_params(rng);
    const SmpOperator A = random_eventually_periodic(c, rng);
    const SmpOperator B = A.shifted(2);
    for (int k = -20; k <= 20; ++k) {
      CHECK(B.p(k + 4) == A.p(k));
      CHECK(B.q(k + 4) == A.q(k));
    }
  }

  TEST_CASE("operator JSON round trip is bit exact") {
    Rng rng(22);
    for (int t = 0; t < 20; ++t) {
      const CurveParams c = random_params(rng);
      const SmpOperator A = random_eventually_periodic(c, rng);
      const std::string s = to_json(A);
      const SmpOperator B = operator_from_json(s);
      CHECK(to_json(B) == s);
      CHECK(B.core().p == A.core().p);
      CHECK(B.core().q_odd == A.core().q_odd);
      CHECK(B.core().r_odd == A.core().r_odd);
      CHECK(B.left_tail() == A.left_tail());
      CHECK(B.curve() == A.curve());
    }
    const SmpOperator T = tau_involution(build_periodic_smp(CurveParams(2, 0.5), {0.5, curve_solve_p1(CurveParams(2, 0.5), 0.5)[0]}));
    CHECK(operator_from_json(to_json(T)).scale() == T.scale());
  }

  TEST_CASE("malformed operator JSON") {
    CHECK_THROWS_AS(operator_from_json("{"), ValidationError);
    CHECK_THROWS_AS(operator_from_json("{\"curve\":{\"a\":1,\"b\":0}}"), ValidationError);
    CHECK_THROWS_AS(operator_from_json(R"({"curve":{"a":1,"b":0},"left_tail":[1],"right_tail":[1,0],)"
                                       R"("core":{"k_min":0,"p":[],"q_odd":[],"r_odd":[]}})"),
                    ValidationError);
    CHECK_THROWS_AS(operator_from_json(R"({"curve":{"a":-1,"b":0},"left_tail":[1,0],"right_tail":[1,0],)"
                                       R"("core":{"k_min":0,"p":[],"q_odd":[],"r_odd":[]}})"),
                    ValidationError);
  }
}
