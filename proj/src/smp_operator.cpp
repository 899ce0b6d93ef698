#include "smpflow/smp_operator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "banded.hpp"
#include "smpflow/error.hpp"

namespace smpflow {

namespace {

constexpr double kMinAbsR = 1e-12;
constexpr double kMaxCoefficient = 1e6;

bool is_odd(int k) noexcept { return (k % 2) != 0; }
bool is_even(int k) noexcept { return (k % 2) == 0; }
std::size_t odd_slot(int k, int k_min) noexcept { return static_cast<std::size_t>((k - k_min - 1) / 2); }

}  // namespace

double tail_p(const CurveParams&, const CurvePoint& point, double scale, int k) noexcept {
  return scale * (is_even(k) ? point.p0 : point.p1);
}

double tail_q_odd(const CurveParams& curve, const CurvePoint& point, double scale) noexcept {
  return scale * (-curve.b() / curve.a() - curve.a() * point.p0 * point.p1);
}

double tail_r(const CurveParams& curve, double scale) noexcept { return scale / curve.a(); }

SmpOperator::SmpOperator(CurveParams curve, CurvePoint left_tail, CurvePoint right_tail, SmpCore core, double scale,
                         double tol_curve)
    : curve_(curve), left_(left_tail), right_(right_tail), core_(std::move(core)), scale_(scale) {
  if (!std::isfinite(scale_) || !(scale_ > 0.0)) throw ValidationError("operator scale must be positive");
  if (!is_even(core_.k_min)) throw ValidationError("core k_min must be even");
  if (core_.p.size() % 2 != 0) throw ValidationError("core must cover whole blocks (k_max odd)");
  const std::size_t blocks = core_.p.size() / 2;
  if (core_.q_odd.size() != blocks || core_.r_odd.size() != blocks) {
    std::ostringstream os;
    os << "core has " << core_.p.size() << " p values but " << core_.q_odd.size() << " q_odd and "
       << core_.r_odd.size() << " r_odd values (expected " << blocks << ")";
    throw ValidationError(os.str());
  }
  require_on_curve(curve_, left_, tol_curve, "left tail");
  require_on_curve(curve_, right_, tol_curve, "right tail");
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || std::abs(v) > kMaxCoefficient) {
      std::ostringstream os;
      os << name << " coefficient " << v << " is not finite or exceeds " << kMaxCoefficient;
      throw ValidationError(os.str());
    }
  };
  for (double v : core_.p) check(v, "p");
  for (double v : core_.q_odd) check(v, "q");
  for (std::size_t i = 0; i < core_.r_odd.size(); ++i) {
    check(core_.r_odd[i], "r");
    if (std::abs(core_.r_odd[i]) < kMinAbsR) {
      std::ostringstream os;
      os << "r_" << core_.k_min + 1 + 2 * static_cast<int>(i) << " vanishes";
      throw StructureError(os.str());
    }
  }
}

SmpOperator SmpOperator::periodic(const CurveParams& curve, const CurvePoint& point, double scale, double tol_curve) {
  return SmpOperator(curve, point, point, SmpCore{}, scale, tol_curve);
}

double SmpOperator::p(int k) const {
  if (in_core(k)) return core_.p[static_cast<std::size_t>(k - core_.k_min)];
  return tail_p(curve_, tail_for(k), scale_, k);
}

double SmpOperator::r(int k) const {
  if (!is_odd(k)) throw ValidationError("r is indexed by odd integers");
  if (in_core(k)) return core_.r_odd[odd_slot(k, core_.k_min)];
  return tail_r(curve_, scale_);
}

double SmpOperator::q(int k) const {
  if (is_even(k)) return p(k) * p(k + 1) / r(k + 1);
  if (in_core(k)) return core_.q_odd[odd_slot(k, core_.k_min)];
  return tail_q_odd(curve_, tail_for(k), scale_);
}

double SmpOperator::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  switch (j - i) {
    case 0:
      return q(i);
    case 1:
      return p(j);
    case 2:
      return is_odd(j) ? r(j) : 0.0;
    default:
      return 0.0;
  }
}

SmpOperator SmpOperator::shifted(int m) const {
  SmpCore c = core_;
  c.k_min += 2 * m;
  return SmpOperator(curve_, left_, right_, std::move(c), scale_, 1.0);
}

SmpOperator SmpOperator::expanded(int k_lo, int k_hi) const {
  int lo = core_.empty() ? k_lo : std::min(core_.k_min, k_lo);
  int hi = core_.empty() ? k_hi : std::max(core_.k_max(), k_hi);
  if (!is_even(lo)) --lo;
  if (!is_odd(hi)) ++hi;
  if (lo == core_.k_min && hi == core_.k_max()) return *this;
  SmpCore c;
  c.k_min = lo;
  for (int k = lo; k <= hi; ++k) {
    c.p.push_back(p(k));
    if (is_odd(k)) {
      c.q_odd.push_back(q(k));
      c.r_odd.push_back(r(k));
    }
  }
  return SmpOperator(curve_, left_, right_, std::move(c), scale_, 1.0);
}

SmpOperator SmpOperator::canonical(double tol) const {
  if (core_.empty()) return *this;
  auto block_matches = [&](int k_even, const CurvePoint& tail) {
    const int k_odd = k_even + 1;
    return std::abs(p(k_even) - tail_p(curve_, tail, scale_, k_even)) <= tol &&
           std::abs(p(k_odd) - tail_p(curve_, tail, scale_, k_odd)) <= tol &&
           std::abs(q(k_odd) - tail_q_odd(curve_, tail, scale_)) <= tol &&
           std::abs(r(k_odd) - tail_r(curve_, scale_)) <= tol;
  };
  int lo = core_.k_min;
  int hi = core_.k_max();
  while (lo < hi && block_matches(lo, left_)) lo += 2;
  while (hi > lo && block_matches(hi - 1, right_)) hi -= 2;
  if (lo == core_.k_min && hi == core_.k_max()) return *this;
  SmpCore c;
  c.k_min = lo;
  for (int k = lo; k <= hi; ++k) {
    c.p.push_back(p(k));
    if (is_odd(k)) {
      c.q_odd.push_back(q(k));
      c.r_odd.push_back(r(k));
    }
  }
  if (c.p.empty()) {
    // Fully absorbed: keep the boundary between the two tails where it was.
    c.k_min = lo;
  }
  return SmpOperator(curve_, left_, right_, std::move(c), scale_, 1.0);
}

SmpOperator SmpOperator::with_negated_p() const {
  SmpCore c = core_;
  for (double& v : c.p) v = -v;
  return SmpOperator(curve_, -left_, -right_, std::move(c), scale_, 1.0);
}

double coefficient_distance(const SmpOperator& x, const SmpOperator& y, int k_lo, int k_hi) {
  double d = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    d = std::max(d, std::abs(x.p(k) - y.p(k)));
    d = std::max(d, std::abs(x.q(k) - y.q(k)));
    if (is_odd(k)) d = std::max(d, std::abs(x.r(k) - y.r(k)));
  }
  return d;
}

double coefficient_distance_mod_sign(const SmpOperator& x, const SmpOperator& y, int k_lo, int k_hi) {
  return std::min(coefficient_distance(x, y, k_lo, k_hi), coefficient_distance(x.with_negated_p(), y, k_lo, k_hi));
}

double InverseBands::rho(int k) const {
  if (!is_even(k)) throw ValidationError("rho is indexed by even integers");
  return outer_at(k);
}

void JacobiOperator::validate() const {
  if (a.size() != b.size()) throw ValidationError("Jacobi a and b windows differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i])) {
      std::ostringstream os;
      os << "a_" << k_min + static_cast<int>(i) << " = " << a[i] << " is not positive";
      throw ValidationError(os.str());
    }
    if (!std::isfinite(b[i])) throw ValidationError("b coefficients must be finite");
  }
}

SparseColumn column(const SmpOperator& A, int j) {
  if (is_even(j)) return {{j - 1, A.p(j)}, {j, A.q(j)}, {j + 1, A.p(j + 1)}};
  return {{j - 2, A.r(j)}, {j - 1, A.p(j)}, {j, A.q(j)}, {j + 1, A.p(j + 1)}, {j + 2, A.r(j + 2)}};
}

IndexedVector apply(const SmpOperator& A, const IndexedVector& x) {
  if (x.values.size() < 5) return {x.lo + 2, {}};
  auto y = IndexedVector::zeros(x.lo + 2, x.hi() - 2);
  for (int i = y.lo; i <= y.hi(); ++i) {
    double s = 0.0;
    for (int j = i - 2; j <= i + 2; ++j) s += A.entry(i, j) * x.at(j);
    y.at(i) = s;
  }
  return y;
}

Eigen::MatrixXd dense_truncation(const SmpOperator& A, int k_lo, int k_hi) {
  if (!(k_lo < k_hi)) throw ValidationError("dense truncation needs k_lo < k_hi");
  const int n = k_hi - k_lo + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) M(i, j) = A.entry(k_lo + i, k_lo + j);
  }
  return M;
}

namespace {

InverseBands inverse_bands_with_padding(const SmpOperator& A, int k_lo, int k_hi, int pad, double max_condition) {
  // A truncation edge that cuts a pair coupled only through p can leave an
  // identically zero row (A(1, 0) pairs (2n-1, 2n), A(0, 1) pairs (2n, 2n+1)),
  // so both parities of the window start are tried.
  std::optional<detail::BandedLU> lu;
  int lo = 0;
  int n = 0;
  double cond = INFINITY;
  std::string failure;
  for (int parity = 1; parity >= 0 && !lu; --parity) {
    int l = k_lo - 4 - pad;
    int h = k_hi + 4 + pad;
    if (std::abs(l % 2) != parity) --l;
    if (std::abs(h % 2) == parity) ++h;
    const int m = h - l + 1;
    detail::BandedLU f(m, 2, 2);
    for (int j = 0; j < m; ++j) {
      for (int i = std::max(0, j - 2); i <= std::min(m - 1, j + 2); ++i) f.set(i, j, A.entry(l + i, l + j));
    }
    try {
      f.factor();
    } catch (const SingularError& e) {
      failure = e.what();
      continue;
    }
    const double rc = f.rcond();
    const double c = rc > 0.0 ? 1.0 / rc : INFINITY;
    if (c > max_condition) {
      std::ostringstream os;
      os << "truncation is badly conditioned (condition estimate " << c << " with padding " << pad
         << "); 0 may be near the spectrum, or a larger padding is needed";
      failure = os.str();
      continue;
    }
    lu.emplace(std::move(f));
    lo = l;
    n = m;
    cond = c;
  }
  if (!lu) throw SingularError(failure);
  const int nrhs = k_hi - k_lo + 1;
  std::vector<double> rhs(static_cast<std::size_t>(n) * nrhs, 0.0);
  for (int c = 0; c < nrhs; ++c) rhs[static_cast<std::size_t>(c) * n + (k_lo + c - lo)] = 1.0;
  lu->solve(rhs, nrhs);

  InverseBands out;
  out.k_lo = k_lo;
  out.padding = pad;
  out.condition = cond;
  out.outer.resize(nrhs);
  out.first.resize(nrhs);
  out.diag.resize(nrhs);
  for (int c = 0; c < nrhs; ++c) {
    const int k = k_lo + c;
    auto x = [&](int row) { return rhs[static_cast<std::size_t>(c) * n + (row - lo)]; };
    out.diag[c] = x(k);
    out.first[c] = x(k - 1);
    out.outer[c] = x(k - 2);
    if (is_odd(k)) out.max_structural_zero = std::max(out.max_structural_zero, std::abs(out.outer[c]));
    out.max_off_band = std::max({out.max_off_band, std::abs(x(k - 3)), std::abs(x(k - 4))});
  }
  for (int c = 1; c < nrhs; ++c) {
    const double lower = rhs[static_cast<std::size_t>(c - 1) * n + (k_lo + c - lo)];
    out.max_asymmetry = std::max(out.max_asymmetry, std::abs(out.first[c] - lower));
  }
  return out;
}

double band_change(const InverseBands& x, const InverseBands& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.diag.size(); ++i) {
    d = std::max({d, std::abs(x.diag[i] - y.diag[i]), std::abs(x.first[i] - y.first[i]),
                  std::abs(x.outer[i] - y.outer[i])});
  }
  return d;
}

}  // namespace

InverseBands inverse_band_entries(const SmpOperator& A, int k_lo, int k_hi, const NumericOptions& opt) {
  if (k_lo > k_hi) throw ValidationError("inverse band window is empty");
  if (opt.padding < 4) throw ValidationError("padding must be at least 4");
  int pad = opt.padding;
  InverseBands prev = inverse_bands_with_padding(A, k_lo, k_hi, pad, opt.max_condition);
  for (int attempt = 0; attempt < 5; ++attempt) {
    pad *= 2;
    InverseBands cur = inverse_bands_with_padding(A, k_lo, k_hi, pad, opt.max_condition);
    cur.last_change = band_change(prev, cur);
    if (cur.last_change <= opt.tol_inverse) return cur;
    prev = std::move(cur);
  }
  std::ostringstream os;
  os << "inverse band entries did not settle under padding doubling (last change " << prev.last_change
     << " at padding " << pad << ")";
  throw ConvergenceError(os.str());
}

SmpOperator tau_involution(const SmpOperator& A, const NumericOptions& opt) {
  // Coefficient k of tau A is read from index k + 1 of A^{-1}; A^{-1} differs from its
  // periodic tail values only within two sites of the core, so a margin of 4 is exact.
  constexpr int kMargin = 4;
  const int lo = A.k_min() - 2 - kMargin;
  const int hi = A.k_max() + kMargin;
  const InverseBands inv = inverse_band_entries(A, lo + 1, hi + 2, opt);
  if (inv.max_structural_zero > opt.tol_struct || inv.max_off_band > opt.tol_struct) {
    std::ostringstream os;
    os << "inverse is not SMP-structured (mirror zero " << inv.max_structural_zero << ", off-band "
       << inv.max_off_band << ")";
    throw StructureError(os.str());
  }
  SmpCore c;
  c.k_min = lo;
  for (int k = lo; k <= hi; ++k) {
    c.p.push_back(-inv.pi(k + 1));
    if (is_odd(k)) {
      c.q_odd.push_back(-inv.sigma(k + 1));
      c.r_odd.push_back(-inv.rho(k + 1));
    }
  }
  // The even diagonal is implied by the convention; it must agree with -sigma.
  for (int k = lo; k < hi; k += 2) {
    const std::size_t i = static_cast<std::size_t>(k - lo);
    const double derived = c.p[i] * c.p[i + 1] / c.r_odd[i / 2];
    const double read = -inv.sigma(k + 1);
    if (std::abs(derived - read) > opt.tol_struct * std::max(1.0, std::abs(read))) {
      std::ostringstream os;
      os << "tau image violates q_{2k} = p_{2k} p_{2k+1} / r_{2k+1} at k = " << k << " (" << derived << " vs "
         << read << ")";
      throw StructureError(os.str());
    }
  }
  auto reflect = [](const CurvePoint& x) { return CurvePoint{-x.p1, -x.p0}; };
  const double a = A.curve().a();
  return SmpOperator(A.curve(), reflect(A.left_tail()), reflect(A.right_tail()), std::move(c), a / A.scale(),
                     opt.tol_curve)
      .canonical(opt.absorb_tol);
}

TildeE0 tilde_e0(const SmpOperator& A) {
  const double p0 = A.p(0);
  const double r1 = A.r(1);
  const double a0 = std::hypot(p0, r1);
  return {a0, p0 / a0, r1 / a0};
}

CyclicityReport cyclicity_check(const SmpOperator& A, int N, double rank_threshold, int boundary_layer) {
  if (N < 4) throw ValidationError("cyclicity check needs N >= 4");
  const int n = 2 * N + 1;
  // Of the two windows [-N, N] and [-N - 1, N - 1], keep the better conditioned one
  // (cutting a p-coupled pair at the edge makes the truncation singular).
  int lo = -N;
  Eigen::MatrixXd M = dense_truncation(A, lo, lo + n - 1);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  {
    Eigen::MatrixXd M2 = dense_truncation(A, lo - 1, lo + n - 2);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu2(M2);
    if (lu2.rcond() > lu.rcond()) {
      --lo;
      M = std::move(M2);
      lu = std::move(lu2);
    }
  }
  const int origin = -lo;  // row of e_0

  Eigen::VectorXd e_m1 = Eigen::VectorXd::Zero(n);
  e_m1(origin - 1) = 1.0;
  const auto t = tilde_e0(A);
  Eigen::VectorXd e_t = Eigen::VectorXd::Zero(n);
  e_t(origin) = t.c0;
  e_t(origin + 1) = t.c1;

  std::vector<Eigen::VectorXd> basis;
  auto accept = [&](Eigen::VectorXd v) -> bool {
    const double norm0 = v.norm();
    if (norm0 == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    const double norm = v.norm();
    if (norm <= rank_threshold * norm0) return false;
    basis.push_back(v / norm);
    return true;
  };

  // Four chains: A and A^{-1} powers of both seeds, each applied to the latest
  // orthonormalized vector of its chain.
  struct Chain {
    Eigen::VectorXd last;
    bool inverse;
    bool alive = true;
  };
  accept(e_m1);
  accept(e_t);
  std::vector<Chain> chains{{basis[0], false}, {basis[0], true}, {basis[1], false}, {basis[1], true}};
  for (int k = 1; k <= N / 2; ++k) {
    for (auto& ch : chains) {
      if (!ch.alive) continue;
      Eigen::VectorXd v = ch.inverse ? Eigen::VectorXd(lu.solve(ch.last)) : Eigen::VectorXd(M * ch.last);
      if (accept(v)) ch.last = basis.back();
      else ch.alive = false;
    }
  }

  CyclicityReport rep;
  rep.dimension = n;
  rep.krylov_vectors = static_cast<int>(basis.size());
  rep.interior_dimension = n - 2 * boundary_layer;
  Eigen::MatrixXd K(rep.interior_dimension, rep.krylov_vectors);
  for (int c = 0; c < rep.krylov_vectors; ++c) K.col(c) = basis[c].segment(boundary_layer, rep.interior_dimension);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(K);
  qr.setThreshold(rank_threshold);
  rep.interior_rank = static_cast<int>(qr.rank());
  return rep;
}

}  // namespace smpflow
