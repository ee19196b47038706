#include "bregkit/geometry.hpp"

#include <cmath>
#include <limits>

namespace bregkit {

double bregman_distance(const LegendreFunction& f, const Vec& y, const Vec& x) {
  check_dim(y, f.dim(), "bregman_distance");
  if (!f.in_closure(y)) throw DomainError("bregman_distance: first argument outside dom f");
  return f.value_closure(y) - f.value(x) - f.gradient(x).dot(y - x);
}

double three_point_gap(const LegendreFunction& f, const Vec& z, const Vec& y, const Vec& x) {
  const double lhs = bregman_distance(f, z, x);
  const double rhs = bregman_distance(f, z, y) + bregman_distance(f, y, x) +
                     (f.gradient(y) - f.gradient(x)).dot(z - y);
  return lhs - rhs;
}

double chain_gap(const LegendreFunction& f, const std::vector<Vec>& chain) {
  if (chain.size() < 2) throw ArgumentError("chain_gap: need at least two points");
  const std::size_t n = chain.size();
  double rhs = 0.0;
  for (std::size_t k = 1; k < n; ++k) rhs += bregman_distance(f, chain[k - 1], chain[k]);
  for (std::size_t k = 2; k < n; ++k)
    rhs += (f.gradient(chain[k - 1]) - f.gradient(chain[k])).dot(chain[0] - chain[k - 1]);
  return bregman_distance(f, chain[0], chain[n - 1]) - rhs;
}

double v_fn(const LegendreFunction& f, const Vec& x, const Vec& xstar) {
  check_dim(x, f.dim(), "v_fn");
  if (!f.in_closure(x)) throw DomainError("v_fn: point outside dom f");
  return f.value_closure(x) - x.dot(xstar) + f.conj_value(xstar);
}

Vec dual_average(const LegendreFunction& f, const std::vector<double>& weights,
                 const std::vector<Vec>& points) {
  if (weights.empty() || weights.size() != points.size())
    throw ArgumentError("dual_average: need matching, nonempty weights and points");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ArgumentError("dual_average: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("dual_average: weights must sum to 1");
  Vec mix = Vec::Zero(f.dim());
  for (std::size_t i = 0; i < points.size(); ++i) mix += weights[i] * f.gradient(points[i]);
  return f.conj_gradient(mix);
}

double total_convexity_estimate(const LegendreFunction& f, const Vec& x, double t,
                                int n_directions, Rng& rng) {
  if (!(t >= 0.0)) throw ArgumentError("total_convexity_estimate: t must be nonnegative");
  if (n_directions < 1) throw ArgumentError("total_convexity_estimate: need at least one direction");
  if (!f.in_interior(x)) throw DomainError("total_convexity_estimate: base point outside int dom f");
  if (t == 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 0; i < n_directions; ++i) {
    const Vec y = x + t * rng.unit_vector(f.dim());
    if (!f.in_closure(y)) continue;
    any = true;
    best = std::min(best, bregman_distance(f, y, x));
  }
  if (!any)
    throw DomainError("total_convexity_estimate: every sampled direction left dom f; shrink t");
  return best;
}

}  // namespace bregkit
