#pragma once

#include <vector>

#include "bregkit/legendre.hpp"
#include "bregkit/rng.hpp"

namespace bregkit {

// D_f(y, x) = f(y) - f(x) - <grad f(x), y - x>.
// y may lie on the domain boundary, x must be interior.
double bregman_distance(const LegendreFunction& f, const Vec& y, const Vec& x);

// Residual of the three-point identity
//   D_f(z, x) - D_f(z, y) - D_f(y, x) - <grad f(y) - grad f(x), z - y>,
// zero in exact arithmetic for any interior triple.
double three_point_gap(const LegendreFunction& f, const Vec& z, const Vec& y, const Vec& x);

// Residual of the telescoped form over a chain y_1 .. y_N (N >= 2):
//   D_f(y_1, y_N) = sum_{k=2..N} D_f(y_{k-1}, y_k)
//                 + sum_{k=3..N} <grad f(y_{k-1}) - grad f(y_k), y_1 - y_{k-1}>.
double chain_gap(const LegendreFunction& f, const std::vector<Vec>& chain);

// V(x, xstar) = f(x) - <x, xstar> + f*(xstar); equals D_f(x, grad f*(xstar)).
double v_fn(const LegendreFunction& f, const Vec& x, const Vec& xstar);

// grad f*( sum_i w_i grad f(x_i) ) for convex weights w. The divergence from
// any fixed z to the result is at most the w-average of the divergences to
// the x_i.
Vec dual_average(const LegendreFunction& f, const std::vector<double>& weights,
                 const std::vector<Vec>& points);

// Test support: smallest divergence D_f(x + t u, x) over n random unit
// directions u (directions leaving the domain are skipped). Positive for
// t > 0; the modulus-of-convexity probe used by the property sweeps.
double total_convexity_estimate(const LegendreFunction& f, const Vec& x, double t,
                                int n_directions, Rng& rng);

}  // namespace bregkit
