#include "bregkit/projection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "bregkit/geometry.hpp"

namespace bregkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool separable(const LegendreFunction& f) {
  return f.kind() != LegendreKind::QuadraticForm;
}

// --- scalar dual search for halfspace / hyperplane -------------------------
//
// z(l) = grad f*(grad f(x) - l a) traces the projection as the multiplier l
// grows; h(l) = <a, z(l)> - b is strictly decreasing, so the projection is
// the root of h. Safeguarded Newton: bisection bracket kept at all times.

struct DualCut {
  const LegendreFunction& f;
  const Vec& a;
  double b;
  Vec u;  // grad f(x)

  Vec point(double l) const { return f.conj_gradient(u - l * a); }

  double h(double l) const { return a.dot(point(l)) - b; }

  // Derivative of h; NaN when unavailable, caller then bisects.
  double hprime(double l) const {
    if (f.kind() == LegendreKind::QuadraticForm) {
      // constant: -a' Q^-1 a
      return -a.dot(f.conj_gradient(a));
    }
    const Vec diag = f.conj_hessian_diag(u - l * a);
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) acc -= a[i] * a[i] * diag[i];
    return std::isfinite(acc) ? acc : std::numeric_limits<double>::quiet_NaN();
  }
};

Vec dual_search(const DualCut& cut, double lo, double hi, double h_lo, double h_hi, double htol,
                int max_iters) {
  // Invariant: h(lo) >= 0 >= h(hi).
  (void)h_lo;
  (void)h_hi;
  double l = 0.5 * (lo + hi);
  for (int it = 0; it < max_iters; ++it) {
    const double val = cut.h(l);
    if (std::abs(val) <= htol) return cut.point(l);
    if (val > 0.0)
      lo = l;
    else
      hi = l;
    if (hi - lo <= 1e-16 * (1.0 + std::abs(hi))) return cut.point(0.5 * (lo + hi));
    const double dval = cut.hprime(l);
    double next = l - val / dval;
    // Take the Newton step only when it lands in the middle half of the
    // bracket; anything else (including the near-zero steps the p-norm
    // conjugate produces at its curvature kinks) bisects, so the bracket
    // shrinks by at least a quarter every iteration.
    const double width = hi - lo;
    if (!std::isfinite(next) || next < lo + 0.25 * width || next > hi - 0.25 * width)
      next = 0.5 * (lo + hi);
    l = next;
  }
  throw ConvergenceError("bregman_project: dual search exhausted its iteration budget");
}

// Linear-gradient geometries admit the textbook formula for a single cut:
// z = x - lambda H^{-1} a with lambda = (a'x - b) / (a'H^{-1}a), clamped to
// lambda >= 0 for a halfspace. No root-find, exact to rounding.
Vec project_cut_linear_gradient(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                                bool halfspace) {
  const Vec& a = set.normal();
  Vec w = a;
  if (f.kind() == LegendreKind::QuadraticForm) w = f.matrix().llt().solve(a);
  double lambda = (a.dot(x) - set.offset()) / a.dot(w);
  if (halfspace && lambda < 0.0) lambda = 0.0;
  return x - lambda * w;
}

Vec project_halfspace(const LegendreFunction& f, const ConvexSet& set, const Vec& x, int max_iters) {
  if (f.kind() == LegendreKind::SquaredNorm || f.kind() == LegendreKind::QuadraticForm)
    return project_cut_linear_gradient(f, set, x, true);
  DualCut cut{f, set.normal(), set.offset(), f.gradient(x)};
  const double htol = 1e-11 * (1.0 + std::abs(cut.b));
  const double h0 = cut.h(0.0);
  if (h0 <= htol) return x;
  double lo = 0.0, hlo = h0, hi = 1.0, hhi = cut.h(hi);
  int grow = 0;
  while (hhi > 0.0) {
    lo = hi;
    hlo = hhi;
    hi *= 2.0;
    hhi = cut.h(hi);
    if (++grow > 200)
      throw InfeasibleError("bregman_project: halfspace appears unreachable within dom f");
  }
  return dual_search(cut, lo, hi, hlo, hhi, htol, max_iters);
}

Vec project_hyperplane(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                       int max_iters) {
  if (f.kind() == LegendreKind::SquaredNorm || f.kind() == LegendreKind::QuadraticForm)
    return project_cut_linear_gradient(f, set, x, false);
  DualCut cut{f, set.normal(), set.offset(), f.gradient(x)};
  const double htol = 1e-11 * (1.0 + std::abs(cut.b));
  const double h0 = cut.h(0.0);
  if (std::abs(h0) <= htol) return x;
  // Bracket with h(lo) >= 0 >= h(hi); h is strictly decreasing in the
  // multiplier, so expand away from zero on the side the sign demands.
  double lo, hi, hlo, hhi;
  int grow = 0;
  if (h0 > 0.0) {
    lo = 0.0;
    hlo = h0;
    hi = 1.0;
    hhi = cut.h(hi);
    while (hhi > 0.0) {
      lo = hi;
      hlo = hhi;
      hi *= 2.0;
      hhi = cut.h(hi);
      if (++grow > 200)
        throw InfeasibleError("bregman_project: hyperplane appears unreachable within dom f");
    }
  } else {
    hi = 0.0;
    hhi = h0;
    lo = -1.0;
    hlo = cut.h(lo);
    while (hlo < 0.0) {
      hi = lo;
      hhi = hlo;
      lo *= 2.0;
      hlo = cut.h(lo);
      if (++grow > 200)
        throw InfeasibleError("bregman_project: hyperplane appears unreachable within dom f");
    }
  }
  return dual_search(cut, lo, hi, hlo, hhi, htol, max_iters);
}

// --- separable box clamp ----------------------------------------------------

Vec project_box_separable(const LegendreFunction& f, const ConvexSet& set, const Vec& x) {
  if (f.kind() == LegendreKind::NegativeEntropy && (set.upper().array() < 0.0).any())
    throw InfeasibleError("bregman_project: box lies outside dom NegativeEntropy");
  return x.cwiseMax(set.lower()).cwiseMin(set.upper());
}

// --- entropy simplex normalization ------------------------------------------

Vec project_simplex_entropy(const ConvexSet& set, const Vec& x) {
  return x * (set.scale() / x.sum());
}

// --- quadratic-form specials --------------------------------------------------
//
// Under f = 0.5 x'Qx the divergence is the Q-metric half-distance, so the
// projections below are small equality-constrained quadratic programs. The
// gradient fallback zigzags on these (curved boundary, non-diagonal metric)
// and can stall just above its certificate, hence the closed-ish forms.

// Ball: stationarity (Q + mu I) z = Qx + mu c with mu >= 0 chosen so the
// constraint is tight. ||z(mu) - c|| falls monotonically in mu, so the
// multiplier is a safeguarded one-dimensional root.
Vec project_ball_quadratic(const LegendreFunction& f, const ConvexSet& set, const Vec& x) {
  const Mat& q = f.matrix();
  const Vec& c = set.center();
  const double r = set.radius();
  const int d = f.dim();
  const Vec qx = q * x;
  const Mat eye = Mat::Identity(d, d);
  auto zee = [&](double mu) -> Vec { return (q + mu * eye).llt().solve(qx + mu * c); };
  auto h = [&](double mu) { return (zee(mu) - c).norm() - r; };

  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200)
      throw ConvergenceError("bregman_project: ball multiplier would not bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return zee(0.5 * (lo + hi));
}

// Ball under a separable generator: with the multiplier fixed, stationarity
// f'(z_i) + mu z_i = f'(x_i) + mu c_i splits into strictly increasing scalar
// equations, and the multiplier is again a monotone one-dimensional root.
Vec project_ball_separable(const LegendreFunction& f, const ConvexSet& set, const Vec& x) {
  const Vec& c = set.center();
  const double r = set.radius();
  const int d = f.dim();
  const Vec gx = f.gradient(x);
  const bool entropy = f.kind() == LegendreKind::NegativeEntropy;

  auto fprime = [&](double t) -> double {
    switch (f.kind()) {
      case LegendreKind::SquaredNorm:
        return t;
      case LegendreKind::PNorm:
        return std::copysign(std::pow(std::abs(t), f.exponent() - 1.0), t);
      case LegendreKind::NegativeEntropy:
        return 1.0 + std::log(t);
      default:
        throw ArgumentError("project_ball_separable: generator is not separable");
    }
  };
  auto coordinate = [&](double rhs, double mu) {
    auto phi = [&](double t) { return fprime(t) + mu * t; };
    double lo = entropy ? 1e-300 : -1.0;
    double hi = 1.0;
    int grow = 0;
    while (phi(hi) < rhs) {
      hi *= 2.0;
      if (++grow > 2000) throw ConvergenceError("bregman_project: ball coordinate ran away");
    }
    if (entropy) {
      if (phi(lo) > rhs) return lo;
    } else {
      while (phi(lo) > rhs) {
        lo *= 2.0;
        if (++grow > 2000) throw ConvergenceError("bregman_project: ball coordinate ran away");
      }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < rhs ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto zee = [&](double mu) -> Vec {
    Vec z(d);
    for (int i = 0; i < d; ++i) z[i] = coordinate(gx[i] + mu * c[i], mu);
    return z;
  };
  auto h = [&](double mu) { return (zee(mu) - c).norm() - r; };

  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200)
      throw ConvergenceError("bregman_project: ball multiplier would not bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return zee(0.5 * (lo + hi));
}

// Simplex: active-set walk on the support. On a support P the optimum solves
// the bordered system [Q_PP 1; 1' 0][w; l] = [(Qx)_P; s]; negative w shrinks
// the step back to the boundary and drops a coordinate, a nonnegative w with
// some dual (Qz - Qx + l)_i < 0 off the support grows it. Returns nullopt if
// the walk exceeds its budget so the caller can fall back.
std::optional<Vec> project_simplex_quadratic(const LegendreFunction& f, const ConvexSet& set,
                                             const Vec& x) {
  const Mat& q = f.matrix();
  const double s = set.scale();
  const int d = f.dim();
  const Vec qx = q * x;

  Vec z = set.euclidean_project(x);
  std::vector<int> support;
  for (int i = 0; i < d; ++i)
    if (z[i] > 0.0) support.push_back(i);

  for (int pass = 0; pass < 30 * d + 60; ++pass) {
    const int m = static_cast<int>(support.size());
    Mat kkt = Mat::Zero(m + 1, m + 1);
    Vec rhs(m + 1);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) kkt(a, b) = q(support[a], support[b]);
      kkt(a, m) = kkt(m, a) = 1.0;
      rhs[a] = qx[support[a]];
    }
    rhs[m] = s;
    const Vec sol = kkt.partialPivLu().solve(rhs);
    const double lambda = sol[m];

    Vec zhat = Vec::Zero(d);
    for (int a = 0; a < m; ++a) zhat[support[a]] = sol[a];

    double wmin = 0.0;
    for (int a = 0; a < m; ++a) wmin = std::min(wmin, sol[a]);
    if (wmin < -1e-13 * (1.0 + s)) {
      // Walk toward zhat until the first coordinate hits zero, drop it.
      double t = 1.0;
      int drop = -1;
      for (int a = 0; a < m; ++a) {
        const int i = support[a];
        if (zhat[i] < z[i]) {
          const double ti = z[i] / (z[i] - zhat[i]);
          if (zhat[i] < 0.0 && ti < t) {
            t = ti;
            drop = a;
          }
        }
      }
      if (drop < 0) return std::nullopt;  // numerically degenerate; let the caller retry
      z = z + t * (zhat - z);
      z[support[drop]] = 0.0;
      support.erase(support.begin() + drop);
      if (support.empty()) return std::nullopt;
      continue;
    }

    z = zhat.cwiseMax(0.0);
    const Vec dual = q * z - qx + lambda * Vec::Ones(d);
    std::vector<bool> on(d, false);
    for (int i : support) on[i] = true;
    int enter = -1;
    double worst = -1e-12 * (1.0 + qx.cwiseAbs().maxCoeff());
    for (int i = 0; i < d; ++i) {
      if (on[i] || z[i] > 0.0) continue;
      if (dual[i] < worst) {
        worst = dual[i];
        enter = i;
      }
    }
    if (enter < 0) return z;
    support.push_back(enter);
    std::sort(support.begin(), support.end());
  }
  return std::nullopt;
}

// Face of a simplex expressed as Simplex ∩ boxes pinning some coordinates to
// zero: the entropy projection zeroes the pinned coordinates and renormalizes
// the rest. The generic fallback cannot serve here because such a set never
// meets the open orthant.
std::optional<Vec> entropy_face_project(const ConvexSet& set, const Vec& x) {
  const ConvexSet* simplex = nullptr;
  std::vector<const ConvexSet*> boxes;
  for (const auto& m : set.members()) {
    if (m.kind() == ConvexSet::Kind::Simplex) {
      if (simplex) return std::nullopt;
      simplex = &m;
    } else if (m.kind() == ConvexSet::Kind::Box) {
      boxes.push_back(&m);
    } else {
      return std::nullopt;
    }
  }
  if (!simplex || boxes.empty()) return std::nullopt;
  const double s = simplex->scale();
  const int d = set.dim();
  std::vector<bool> pinned(d, false);
  for (const auto* box : boxes) {
    for (int i = 0; i < d; ++i) {
      if (box->lower()[i] > 0.0) return std::nullopt;
      if (box->upper()[i] <= 0.0)
        pinned[i] = true;
      else if (box->upper()[i] < s)
        return std::nullopt;  // genuinely binding upper bound, not a face
    }
  }
  double support_sum = 0.0;
  for (int i = 0; i < d; ++i)
    if (!pinned[i]) support_sum += x[i];
  if (support_sum <= 0.0) return std::nullopt;
  Vec z = Vec::Zero(d);
  for (int i = 0; i < d; ++i)
    if (!pinned[i]) z[i] = x[i] * s / support_sum;
  if (!set.contains(z, 1e-9)) return std::nullopt;
  return z;
}

// --- projected gradient fallback ---------------------------------------------

Vec project_gradient_fallback(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                              const ProjectOptions& opts) {
  const Vec gx = f.gradient(x);
  Vec y = feasible_interior_start(f, set, x);
  double phi = bregman_distance(f, y, x);
  Vec g = f.gradient(y) - gx;
  const double diam = std::min(set.diameter_hint(), 1e3);
  double eta = 1.0;

  for (int it = 0; it < opts.max_iters; ++it) {
    // Fixed unit-step residual certifies the variational inequality up to a
    // factor of (diameter + |g|).
    const double r1 = (y - set.euclidean_project(y - g)).norm();
    if (r1 * (1.0 + diam + g.norm()) <= opts.tol || r1 <= 1e-15 * (1.0 + y.norm())) return y;

    bool moved = false;
    while (eta > 1e-18) {
      const Vec cand = set.euclidean_project(y - eta * g);
      const Vec d = cand - y;
      if (d.norm() == 0.0) break;
      if (f.in_interior(cand)) {
        const double phi_cand = bregman_distance(f, cand, x);
        if (phi_cand <= phi + g.dot(d) + d.squaredNorm() / (2.0 * eta)) {
          y = cand;
          phi = phi_cand;
          g = f.gradient(y) - gx;
          eta = std::min(eta * 1.25, 1e6);
          moved = true;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!moved) {
      const double r = (y - set.euclidean_project(y - g)).norm();
      if (r * (1.0 + diam + g.norm()) <= opts.tol * 10.0) return y;
      throw ConvergenceError("bregman_project: fallback stalled before reaching tolerance");
    }
  }
  throw ConvergenceError("bregman_project: fallback exhausted its iteration budget");
}

}  // namespace

Vec feasible_interior_start(const LegendreFunction& f, const ConvexSet& set, const Vec& near) {
  Vec y = set.euclidean_project(near);
  if (f.in_interior(y)) return y;
  const Vec& w = set.witness();
  if (!f.in_interior(w))
    throw InfeasibleError("feasible_interior_start: set has no point interior to dom f");
  for (double t = 1e-6; t <= 1.0; t *= 10.0) {
    const Vec cand = (1.0 - t) * y + t * w;
    if (f.in_interior(cand) && set.contains(cand, 1e-9)) return cand;
  }
  return w;
}

Vec bregman_project(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                    const ProjectOptions& opts) {
  if (f.dim() != set.dim()) throw ArgumentError("bregman_project: dimension mismatch");
  check_dim(x, f.dim(), "bregman_project");
  check_finite(x, "bregman_project");
  // Single linear cuts under a linear gradient map go straight to the closed
  // form: the membership shortcut below would otherwise leave near-boundary
  // points unprojected, and iterations that funnel through such a cut every
  // step would keep that slack forever.
  const bool linear_gradient =
      f.kind() == LegendreKind::SquaredNorm || f.kind() == LegendreKind::QuadraticForm;
  if (linear_gradient &&
      (set.kind() == ConvexSet::Kind::Halfspace || set.kind() == ConvexSet::Kind::Hyperplane))
    return project_cut_linear_gradient(f, set, x, set.kind() == ConvexSet::Kind::Halfspace);

  if (set.contains(x)) return x;
  if (!f.in_interior(x))
    throw DomainError("bregman_project: point to project must sit in int dom f");

  switch (set.kind()) {
    case ConvexSet::Kind::Halfspace:
      return project_halfspace(f, set, x, 200);
    case ConvexSet::Kind::Hyperplane:
      return project_hyperplane(f, set, x, 200);
    case ConvexSet::Kind::Box:
      if (separable(f)) return project_box_separable(f, set, x);
      break;
    case ConvexSet::Kind::Ball:
      if (f.kind() == LegendreKind::SquaredNorm) return set.euclidean_project(x);
      if (f.kind() == LegendreKind::QuadraticForm) return project_ball_quadratic(f, set, x);
      return project_ball_separable(f, set, x);
    case ConvexSet::Kind::Simplex:
      if (f.kind() == LegendreKind::NegativeEntropy) return project_simplex_entropy(set, x);
      if (f.kind() == LegendreKind::SquaredNorm) return set.euclidean_project(x);
      if (f.kind() == LegendreKind::QuadraticForm)
        if (auto z = project_simplex_quadratic(f, set, x)) return *z;
      break;
    case ConvexSet::Kind::Intersection:
      if (f.kind() == LegendreKind::NegativeEntropy)
        if (auto z = entropy_face_project(set, x)) return *z;
      break;
  }
  return project_gradient_fallback(f, set, x, opts);
}

double projection_vi_residual(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                              const Vec& z, const std::vector<Vec>& probes) {
  if (probes.empty()) throw ArgumentError("projection_vi_residual: empty probe set");
  const Vec w = f.gradient(x) - f.gradient(z);
  double worst = -kInf;
  for (const auto& y : probes) {
    if (!set.contains(y, 1e-6))
      throw ArgumentError("projection_vi_residual: probe fails set membership");
    worst = std::max(worst, w.dot(y - z));
  }
  return worst;
}

double pythagoras_gap(const LegendreFunction& f, const ConvexSet& set, const Vec& x, const Vec& y,
                      const ProjectOptions& opts) {
  if (!set.contains(y, 1e-7))
    throw ArgumentError("pythagoras_gap: comparison point must belong to the set");
  const Vec z = bregman_project(f, set, x, opts);
  return bregman_distance(f, y, x) - bregman_distance(f, y, z) - bregman_distance(f, z, x);
}

}  // namespace bregkit
