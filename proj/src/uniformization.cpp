#include "smpflow/uniformization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "smpflow/error.hpp"

namespace smpflow {

namespace {

using cd = std::complex<double>;

constexpr int kMaxRefinements = 20;
constexpr double kRelTarget = 1e-13;
constexpr double kBranchGuard = 1e-12;

std::array<double, 4> branch_points(const TwoIntervalSet& E) { return {E.b0, E.a1, E.b1, E.a0}; }

bool is_branch_point(const TwoIntervalSet& E, double x) {
  const auto bp = branch_points(E);
  return std::find(bp.begin(), bp.end(), x) != bp.end();
}

// Product of |x - e| over branch points other than skip.
double others_abs(const TwoIntervalSet& E, double x, double skip) {
  double p = 1.0;
  for (double e : branch_points(E))
    if (e != skip) p *= std::abs(x - e);
  return p;
}

// Principal square root, with negative reals taken from the upper half-plane.
cd upper_sqrt(cd w) {
  if (w.imag() == 0.0 && w.real() < 0.0) return {0.0, std::sqrt(-w.real())};
  return std::sqrt(w);
}

template <class T, class F>
T composite_gauss(F f, double lo, double hi, double& last_change, int& refinements) {
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  auto panels = [&](int n) {
    T s{};
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) s += Gauss::integrate(f, lo + i * h, lo + (i + 1) * h);
    return s;
  };
  int n = 1;
  T prev = panels(n);
  for (int r = 1; r <= kMaxRefinements; ++r) {
    n *= 2;
    T cur = panels(n);
    const double scale = std::max(std::abs(cur), 1e-300);
    last_change = std::abs(cur - prev) / scale;
    refinements = r;
    if (last_change <= kRelTarget && r >= 2) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "quadrature did not converge after " << kMaxRefinements << " step halvings (relative change " << last_change
     << ")";
  throw ConvergenceError(os.str());
}

}  // namespace

QuadratureResult quartic_integral(const TwoIntervalSet& E, double lo, double hi) {
  E.validate();
  if (!(lo < hi)) throw ValidationError("quartic_integral needs lo < hi");
  if (lo < E.b0 || hi > E.a0) throw ValidationError("quartic_integral range must lie in [b0, a0]");
  std::vector<double> cuts{lo};
  for (double e : branch_points(E))
    if (e > lo && e < hi) cuts.push_back(e);
  cuts.push_back(hi);

  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i];
    const double v = cuts[i + 1];
    const double m = 0.5 * (u + v);
    // Each half either absorbs its branch point with x = e +- t^2, or is plain.
    for (int side = 0; side < 2; ++side) {
      const double e = side == 0 ? u : v;
      const double dir = side == 0 ? 1.0 : -1.0;
      double change = 0.0;
      int refs = 0;
      double val;
      if (is_branch_point(E, e)) {
        const double tmax = std::sqrt(std::abs(m - e));
        auto f = [&](double t) { return 2.0 / std::sqrt(others_abs(E, e + dir * t * t, e)); };
        val = composite_gauss<double>(f, 0.0, tmax, change, refs);
      } else {
        auto f = [&](double x) { return 1.0 / std::sqrt(others_abs(E, x, NAN)); };
        val = side == 0 ? composite_gauss<double>(f, u, m, change, refs) : composite_gauss<double>(f, m, v, change, refs);
      }
      out.value += val;
      out.last_change = std::max(out.last_change, change);
      out.refinements = std::max(out.refinements, refs);
    }
  }
  return out;
}

UniformizationData group_multiplier(const TwoIntervalSet& E, bool use_left_band) {
  E.validate();
  const QuadratureResult num = use_left_band ? quartic_integral(E, E.b0, E.a1) : quartic_integral(E, E.b1, E.a0);
  const QuadratureResult den = quartic_integral(E, E.b0, E.a0);
  UniformizationData U;
  U.E = E;
  U.I_num = num.value;
  U.I_den = den.value;
  U.rho = std::exp(2.0 * std::numbers::pi * U.I_num / U.I_den);
  U.quadrature_change = std::max(num.last_change, den.last_change);
  return U;
}

std::vector<cd> default_path(const TwoIntervalSet& E, cd z) {
  if (z.imag() < 0.0) throw ValidationError("z must lie in the closed upper half-plane");
  if (z.imag() == 0.0 && z.real() <= E.b1) {
    const cd apex{0.5 * (E.a0 + z.real()), 0.5 * E.diameter()};
    return {cd{E.a0, 0.0}, apex, z};
  }
  return {cd{E.a0, 0.0}, z};
}

CoordinateResult uniformizing_coordinate_along(const UniformizationData& U, const std::vector<cd>& path) {
  const TwoIntervalSet& E = U.E;
  if (path.size() < 2 || path.front() != cd{E.a0, 0.0}) throw ValidationError("path must start at a0");
  const auto bp = branch_points(E);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i].imag() < 0.0) throw ValidationError("path must stay in the closed upper half-plane");
    for (double e : bp) {
      if (std::abs(path[i] - e) <= kBranchGuard) {
        std::ostringstream os;
        os << "path passes within " << kBranchGuard << " of the branch point " << e;
        throw DomainError(os.str());
      }
    }
  }
  CoordinateResult out;
  if (path.back() == cd{E.a0, 0.0} && path.size() == 2) {
    out.w = {1.0, 0.0};
    return out;
  }
  auto others = [&](cd x) {
    cd p{1.0, 0.0};
    for (double e : {E.b0, E.a1, E.b1}) p *= upper_sqrt(x - e);
    return p;
  };
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const cd z0 = path[i];
    const cd z1 = path[i + 1];
    const cd dz = z1 - z0;
    double change = 0.0;
    int refs = 0;
    cd val;
    if (i == 0) {
      // zeta = a0 + s^2 dz absorbs the branch point at a0.
      const cd root_dz = upper_sqrt(dz);
      auto f = [&](double s) { return 2.0 * dz / (root_dz * others(z0 + s * s * dz)); };
      val = composite_gauss<cd>(f, 0.0, 1.0, change, refs);
    } else {
      auto f = [&](double s) {
        const cd x = z0 + s * dz;
        return dz / (upper_sqrt(x - E.a0) * others(x));
      };
      val = composite_gauss<cd>(f, 0.0, 1.0, change, refs);
    }
    out.integral += val;
    out.quadrature_change = std::max(out.quadrature_change, change);
  }
  out.w = std::exp(cd{0.0, std::numbers::pi} * out.integral / U.I_den);
  return out;
}

CoordinateResult uniformizing_coordinate(const UniformizationData& U, cd z) {
  if (z == cd{U.E.a0, 0.0}) return {cd{1.0, 0.0}, cd{0.0, 0.0}, 0.0};
  return uniformizing_coordinate_along(U, default_path(U.E, z));
}

}  // namespace smpflow
