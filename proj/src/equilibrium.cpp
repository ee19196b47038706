#include "bregkit/equilibrium.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bregkit/geometry.hpp"
#include "bregkit/projection.hpp"
#include "bregkit/rng.hpp"

namespace bregkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Probe clouds are seeded with a fixed constant mixed with the dimension so
// every run sees the same cloud for the same feasible set.
std::uint64_t probe_seed(int dim) { return 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(dim); }
}  // namespace

// --- ConvexHandle -----------------------------------------------------------

struct ConvexHandle::Impl {
  Kind kind;
  double w = 0.0;
  Vec c;
};

ConvexHandle::ConvexHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ConvexHandle ConvexHandle::l1(double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) throw ArgumentError("l1: weight must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::L1;
  impl->w = weight;
  return ConvexHandle(std::move(impl));
}

ConvexHandle ConvexHandle::linear(Vec cost) {
  check_finite(cost, "linear handle");
  if (cost.size() < 1) throw ArgumentError("linear handle: empty cost");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Linear;
  impl->c = std::move(cost);
  return ConvexHandle(std::move(impl));
}

ConvexHandle ConvexHandle::max_coordinate(double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw ArgumentError("max_coordinate: weight must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::MaxCoordinate;
  impl->w = weight;
  return ConvexHandle(std::move(impl));
}

ConvexHandle::Kind ConvexHandle::kind() const { return impl_->kind; }

double ConvexHandle::weight() const {
  if (impl_->kind == Kind::Linear) throw ArgumentError("weight: linear handles have a cost vector");
  return impl_->w;
}

const Vec& ConvexHandle::cost() const {
  if (impl_->kind != Kind::Linear) throw ArgumentError("cost: only linear handles have one");
  return impl_->c;
}

double ConvexHandle::value(const Vec& y) const {
  switch (impl_->kind) {
    case Kind::L1: return impl_->w * y.cwiseAbs().sum();
    case Kind::Linear: return impl_->c.dot(y);
    case Kind::MaxCoordinate: return impl_->w * y.maxCoeff();
  }
  return 0.0;
}

Vec ConvexHandle::subgradient(const Vec& y) const {
  switch (impl_->kind) {
    case Kind::L1: {
      Vec g(y.size());
      for (int i = 0; i < y.size(); ++i) g[i] = y[i] == 0.0 ? 0.0 : std::copysign(impl_->w, y[i]);
      return g;
    }
    case Kind::Linear:
      return impl_->c;
    case Kind::MaxCoordinate: {
      int j = 0;
      y.maxCoeff(&j);
      Vec g = Vec::Zero(y.size());
      g[j] = impl_->w;
      return g;
    }
  }
  return Vec();
}

Vec ConvexHandle::prox(const Vec& v, double tau) const {
  if (!(tau > 0.0)) throw ArgumentError("prox: tau must be positive");
  switch (impl_->kind) {
    case Kind::L1: {
      const double t = impl_->w * tau;
      Vec out(v.size());
      for (int i = 0; i < v.size(); ++i)
        out[i] = std::copysign(std::max(std::abs(v[i]) - t, 0.0), v[i]);
      return out;
    }
    case Kind::Linear:
      return v - tau * impl_->c;
    case Kind::MaxCoordinate:
      // Moreau: the max is the support function of the unit simplex.
      return v - project_simplex_euclidean(v, tau * impl_->w);
  }
  return v;
}

std::string ConvexHandle::describe() const {
  std::ostringstream os;
  switch (impl_->kind) {
    case Kind::L1: os << "L1(w=" << impl_->w << ")"; break;
    case Kind::Linear: os << "Linear(d=" << impl_->c.size() << ")"; break;
    case Kind::MaxCoordinate: os << "MaxCoordinate(w=" << impl_->w << ")"; break;
  }
  return os.str();
}

// --- Bifunction ---------------------------------------------------------------

struct Bifunction::Impl {
  Kind kind;
  int dim = 0;
  Mat A;
  Vec c;
  std::optional<ConvexHandle> h;
  std::optional<ConvexSet> set;
  std::vector<Vec> probes;
};

Bifunction::Bifunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Bifunction Bifunction::linear_monotone(Mat a, Vec c, ConvexSet set) {
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  if (eig.info() != Eigen::Success)
    throw ArgumentError("linear_monotone: could not verify monotonicity");
  const double scale = 1.0 + sym.cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
    throw ArgumentError("linear_monotone: A + A' must be positive semidefinite");
  return linear_monotone_unchecked(std::move(a), std::move(c), std::move(set));
}

Bifunction Bifunction::linear_monotone_unchecked(Mat a, Vec c, ConvexSet set) {
  if (a.rows() != a.cols() || a.rows() != c.size() || set.dim() != c.size())
    throw ArgumentError("linear_monotone: dimensions of A, c and the set must agree");
  if (!a.allFinite()) throw ArgumentError("linear_monotone: matrix entries must be finite");
  check_finite(c, "linear_monotone");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::LinearMonotone;
  impl->dim = static_cast<int>(c.size());
  impl->A = std::move(a);
  impl->c = std::move(c);
  impl->set = std::move(set);
  impl->probes = impl->set->probe_points(64, 64, probe_seed(impl->dim));
  return Bifunction(std::move(impl));
}

Bifunction Bifunction::proximal_convex(ConvexHandle h, ConvexSet set) {
  if (h.kind() == ConvexHandle::Kind::Linear && h.cost().size() != set.dim())
    throw ArgumentError("proximal_convex: cost dimension must match the set");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::ProximalConvex;
  impl->dim = set.dim();
  impl->h = std::move(h);
  impl->set = std::move(set);
  impl->probes = impl->set->probe_points(64, 64, probe_seed(impl->dim));
  return Bifunction(std::move(impl));
}

Bifunction::Kind Bifunction::kind() const { return impl_->kind; }
int Bifunction::dim() const { return impl_->dim; }
const ConvexSet& Bifunction::feasible_set() const { return *impl_->set; }
const std::vector<Vec>& Bifunction::probes() const { return impl_->probes; }

const Mat& Bifunction::matrix() const {
  if (impl_->kind != Kind::LinearMonotone) throw ArgumentError("matrix: wrong bifunction family");
  return impl_->A;
}
const Vec& Bifunction::shift() const {
  if (impl_->kind != Kind::LinearMonotone) throw ArgumentError("shift: wrong bifunction family");
  return impl_->c;
}
const ConvexHandle& Bifunction::handle() const {
  if (impl_->kind != Kind::ProximalConvex) throw ArgumentError("handle: wrong bifunction family");
  return *impl_->h;
}

double Bifunction::eval(const Vec& x, const Vec& y) const {
  check_dim(x, impl_->dim, "Bifunction::eval");
  check_dim(y, impl_->dim, "Bifunction::eval");
  check_finite(x, "Bifunction::eval");
  check_finite(y, "Bifunction::eval");
  if (impl_->kind == Kind::LinearMonotone) return (impl_->A * x + impl_->c).dot(y - x);
  return impl_->h->value(y) - impl_->h->value(x);
}

std::string Bifunction::describe() const {
  std::ostringstream os;
  if (impl_->kind == Kind::LinearMonotone)
    os << "LinearMonotone(d=" << impl_->dim << ")";
  else
    os << "ProximalConvex(" << impl_->h->describe() << ")";
  os << " on " << impl_->set->describe();
  return os.str();
}

// --- resolvent ----------------------------------------------------------------

namespace {

// min over the probe cloud of g(z, y) + <grad f(z) - grad f(x), y - z>;
// nonnegative certifies z as the resolvent point.
double resolvent_probe_margin(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                              const Vec& z) {
  const Vec w = f.gradient(z) - f.gradient(x);
  double margin = kInf;
  for (const auto& y : g.probes()) margin = std::min(margin, g.eval(z, y) + w.dot(y - z));
  return margin;
}

// Affine bifunctions reduce to one dual shift plus a projection.
std::optional<Vec> affine_shift(const Bifunction& g) {
  if (g.kind() == Bifunction::Kind::LinearMonotone) {
    if (g.matrix().cwiseAbs().maxCoeff() == 0.0) return g.shift();
    return std::nullopt;
  }
  if (g.handle().kind() == ConvexHandle::Kind::Linear) return g.handle().cost();
  return std::nullopt;
}

// When grad f is linear (H = I or Q), the resolvent condition
// <Az + c + H(z - x), y - z> >= 0 for all y in C is met with the left factor
// equal to zero whenever (A + H) z = Hx - c lands inside C, so that z is the
// exact answer. A + H is nonsingular: its symmetric part is SPD.
std::optional<Vec> linear_interior_solution(const LegendreFunction& f, const Bifunction& g,
                                            const Vec& x) {
  Mat h;
  if (f.kind() == LegendreKind::SquaredNorm)
    h = Mat::Identity(f.dim(), f.dim());
  else if (f.kind() == LegendreKind::QuadraticForm)
    h = f.matrix();
  else
    return std::nullopt;
  const Vec z = (g.matrix() + h).partialPivLu().solve(h * x - g.shift());
  if (!z.allFinite() || !g.feasible_set().contains(z, 0.0)) return std::nullopt;
  return z;
}

Vec resolve_extragradient(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                          const ResolveOptions& opts) {
  const ConvexSet& set = g.feasible_set();
  const Mat& A = g.matrix();
  const Vec& c = g.shift();
  const Vec gx = f.gradient(x);
  const auto field = [&](const Vec& z) -> Vec { return A * z + c + f.gradient(z) - gx; };

  Vec z = opts.start ? feasible_interior_start(f, set, *opts.start)
                     : feasible_interior_start(f, set, x);
  const double diamcap = std::min(set.diameter_hint(), 1e3);
  double tau = 1.0;
  double target = opts.tol;

  for (int it = 0; it < opts.max_iters; ++it) {
    const Vec Fz = field(z);
    const double rnat = (z - set.euclidean_project(z - Fz)).norm();
    if (rnat * (1.0 + diamcap + Fz.norm()) <= target || rnat <= 1e-15 * (1.0 + z.norm())) {
      if (resolvent_probe_margin(f, g, x, z) >= -opts.tol) return z;
      target *= 0.25;
      if (target < 1e-17)
        throw ConvergenceError("resolve: residual target underflow before certification");
    }

    bool stepped = false;
    for (int tries = 0; tries < 80 && !stepped; ++tries) {
      const Vec zbar = set.euclidean_project(z - tau * Fz);
      if (!f.in_interior(zbar)) {
        tau *= 0.5;
        continue;
      }
      const Vec Fzbar = field(zbar);
      if (tau * (Fzbar - Fz).norm() > 0.9 * (zbar - z).norm() + 1e-18) {
        tau *= 0.5;
        continue;
      }
      const Vec znext = set.euclidean_project(z - tau * Fzbar);
      if (!f.in_interior(znext)) {
        tau *= 0.5;
        continue;
      }
      z = znext;
      stepped = true;
    }
    if (!stepped) throw ConvergenceError("resolve: extragradient could not find a usable step");
    tau = std::min(tau * 1.05, 1e3);
  }
  throw ConvergenceError("resolve: extragradient exhausted its iteration budget");
}

// argmin over the box of 0.5||u - v||^2 + t * max_i(u_i). With the epigraph
// variable m, the best u at fixed m is clamp(v, lo, min(hi, m)) and the
// one-sided m-derivative t - sum_{v_i > m, hi_i > m} (v_i - m) is piecewise
// linear and nondecreasing with upward jumps at the hi_i. Walk its segments.
Vec prox_max_over_box(const Vec& v, double t, const Vec& lo, const Vec& hi) {
  const double mlo = lo.maxCoeff();
  auto slope = [&](double m) {
    double s = t;
    for (int i = 0; i < v.size(); ++i)
      if (v[i] > m && hi[i] > m) s -= v[i] - m;
    return s;
  };
  double m = mlo;
  if (slope(mlo) < 0.0) {
    std::vector<double> bp{mlo};
    for (int i = 0; i < v.size(); ++i) {
      if (v[i] > mlo) bp.push_back(v[i]);
      if (hi[i] > mlo && std::isfinite(hi[i])) bp.push_back(hi[i]);
    }
    std::sort(bp.begin(), bp.end());
    m = bp.back();  // slope is t > 0 past the last breakpoint
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
      const double a = bp[s], b = bp[s + 1];
      if (!(b > a)) continue;
      const double mid = 0.5 * (a + b);
      double sum = 0.0;
      int k = 0;
      for (int i = 0; i < v.size(); ++i)
        if (v[i] > mid && hi[i] > mid) {
          sum += v[i];
          ++k;
        }
      if (t - (sum - static_cast<double>(k) * a) >= 0.0) {
        m = a;  // the derivative jumped across zero at this breakpoint
        break;
      }
      if (k > 0) {
        const double root = (sum - t) / static_cast<double>(k);
        if (root <= b) {
          m = std::max(root, a);
          break;
        }
      }
    }
  }
  Vec out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], lo[i], std::min(hi[i], m));
  return out;
}

// Proximal map of h plus the set indicator, exact on the supported shapes.
std::optional<Vec> combined_prox(const ConvexHandle& h, const ConvexSet& set, const Vec& v,
                                 double tau) {
  if (h.kind() == ConvexHandle::Kind::L1 && set.kind() == ConvexSet::Kind::Box)
    return h.prox(v, tau).cwiseMax(set.lower()).cwiseMin(set.upper());
  if (h.kind() == ConvexHandle::Kind::MaxCoordinate && set.kind() == ConvexSet::Kind::Box)
    return prox_max_over_box(v, tau * h.weight(), set.lower(), set.upper());
  const Vec u = h.prox(v, tau);
  if (set.contains(u, 1e-12)) return u;  // unconstrained prox already feasible
  return std::nullopt;
}

Vec resolve_forward_backward(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                             const ResolveOptions& opts) {
  const ConvexSet& set = g.feasible_set();
  const ConvexHandle& h = g.handle();
  const Vec gx = f.gradient(x);

  Vec z = opts.start ? feasible_interior_start(f, set, *opts.start)
                     : feasible_interior_start(f, set, x);
  const double diamcap = std::min(set.diameter_hint(), 1e3);
  double tau = 1.0;
  double target = opts.tol;

  for (int it = 0; it < opts.max_iters; ++it) {
    const Vec gs = f.gradient(z) - gx;

    const auto unit = combined_prox(h, set, z - gs, 1.0);
    const double rnat = unit ? (z - *unit).norm() : kInf;
    if (rnat * (1.0 + diamcap + gs.norm()) <= target || (it > 0 && it % 25 == 0)) {
      if (resolvent_probe_margin(f, g, x, z) >= -opts.tol) return z;
      if (rnat * (1.0 + diamcap + gs.norm()) <= target) {
        target *= 0.25;
        if (target < 1e-17)
          throw ConvergenceError("resolve: residual target underflow before certification");
      }
    }

    bool stepped = false;
    while (tau > 1e-14) {
      const auto cand = combined_prox(h, set, z - tau * gs, tau);
      if (!cand || !f.in_interior(*cand)) {
        tau *= 0.5;
        continue;
      }
      const Vec d = *cand - z;
      const double lhs = bregman_distance(f, *cand, x);
      const double rhs =
          bregman_distance(f, z, x) + gs.dot(d) + d.squaredNorm() / (2.0 * tau);
      if (lhs <= rhs + 1e-14 * (1.0 + std::abs(lhs))) {
        z = *cand;
        stepped = true;
        break;
      }
      tau *= 0.5;
    }
    if (!stepped)
      throw ConvergenceError(
          "resolve: forward-backward stalled; this handle/set pairing has no exact proximal map");
    tau = std::min(tau * 1.2, 1e3);
  }
  throw ConvergenceError("resolve: forward-backward exhausted its iteration budget");
}

}  // namespace

Vec resolve(const LegendreFunction& f, const Bifunction& g, const Vec& x,
            const ResolveOptions& opts) {
  if (f.dim() != g.dim()) throw ArgumentError("resolve: dimension mismatch");
  check_dim(x, f.dim(), "resolve");
  check_finite(x, "resolve");
  if (!f.in_interior(x)) throw DomainError("resolve: x must sit in int dom f");
  if (!(opts.tol > 0.0)) throw ArgumentError("resolve: tol must be positive");

  if (const auto shift = affine_shift(g)) {
    ProjectOptions popts;
    popts.tol = std::min(opts.tol, popts.tol);
    popts.max_iters = opts.max_iters;
    return bregman_project(f, g.feasible_set(), f.conj_gradient(f.gradient(x) - *shift), popts);
  }
  if (g.kind() == Bifunction::Kind::LinearMonotone) {
    if (const auto z = linear_interior_solution(f, g, x)) return *z;
    return resolve_extragradient(f, g, x, opts);
  }
  return resolve_forward_backward(f, g, x, opts);
}

double resolvent_inequality_gap(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                                const Vec& q, const ResolveOptions& opts) {
  if (ep_residual(g, q) > 1e-6)
    throw ArgumentError("resolvent_inequality_gap: q is not an equilibrium point");
  const Vec z = resolve(f, g, x, opts);
  return bregman_distance(f, q, x) - bregman_distance(f, q, z) - bregman_distance(f, z, x);
}

double firmly_nonexpansive_gap(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                               const Vec& y, const ResolveOptions& opts) {
  const Vec tx = resolve(f, g, x, opts);
  const Vec ty = resolve(f, g, y, opts);
  const Vec lhs = f.gradient(x) - f.gradient(y) - (f.gradient(tx) - f.gradient(ty));
  return lhs.dot(tx - ty);
}

double ep_residual(const Bifunction& g, const Vec& z, int n_probes) {
  check_dim(z, g.dim(), "ep_residual");
  if (!g.feasible_set().contains(z, 1e-7))
    throw ArgumentError("ep_residual: z must belong to the feasible set");
  if (n_probes < 1) throw ArgumentError("ep_residual: need at least one probe");
  double worst = 0.0;
  if (n_probes == 128) {
    for (const auto& y : g.probes()) worst = std::max(worst, -g.eval(z, y));
  } else {
    const auto cloud =
        g.feasible_set().probe_points(n_probes / 2, n_probes - n_probes / 2, probe_seed(g.dim()));
    for (const auto& y : cloud) worst = std::max(worst, -g.eval(z, y));
  }
  return worst;
}

// --- axiom sweep ----------------------------------------------------------------

AxiomReport check_axioms(const Bifunction& g, int n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw ArgumentError("check_axioms: need at least two samples");
  const auto cloud = g.feasible_set().probe_points(n_samples, n_samples / 2, seed);
  Rng rng(seed ^ 0xabcdef12ULL);
  const int m = static_cast<int>(cloud.size());

  AxiomReport report;
  auto& checks = report.checks;
  checks.resize(4);
  checks[0].axiom = "vanishing diagonal";
  checks[1].axiom = "monotonicity";
  checks[2].axiom = "continuity in first argument";
  checks[3].axiom = "convexity in second argument";
  for (auto& c : checks) {
    c.pass = true;
    c.worst = -kInf;
  }

  auto record = [](AxiomCheck& c, double violation, const Vec& x, const Vec& y, double tol) {
    if (violation > c.worst) {
      c.worst = violation;
      c.witness_x = x;
      c.witness_y = y;
    }
    if (violation > tol) c.pass = false;
  };

  for (int k = 0; k < n_samples; ++k) {
    const Vec& x = cloud[rng.index(m)];
    const Vec& y = cloud[rng.index(m)];
    const Vec& z = cloud[rng.index(m)];
    const double gxy = g.eval(x, y);
    const double scale = 1.0 + std::abs(gxy) + x.norm() + y.norm();

    record(checks[0], std::abs(g.eval(x, x)), x, x, 1e-12 * scale);
    record(checks[1], gxy + g.eval(y, x), x, y, 1e-10 * scale);

    const double t = 1e-6;
    const Vec xt = (1.0 - t) * x + t * z;
    record(checks[2], std::abs(g.eval(xt, y) - gxy) - 1e-3 * scale, x, y, 0.0);

    const double lam = rng.uniform01();
    const Vec mix = lam * y + (1.0 - lam) * z;
    record(checks[3], g.eval(x, mix) - lam * g.eval(x, y) - (1.0 - lam) * g.eval(x, z), x, mix,
           1e-10 * scale);
  }

  report.all_pass = true;
  for (auto& c : checks) {
    std::ostringstream os;
    os << "worst violation " << c.worst;
    c.detail = os.str();
    report.all_pass = report.all_pass && c.pass;
  }
  return report;
}

}  // namespace bregkit
