#pragma once

#include "bregkit/legendre.hpp"
#include "bregkit/sets.hpp"

namespace bregkit {

struct ProjectOptions {
  double tol = 1e-8;      // target residual of the optimality condition
  int max_iters = 10000;  // budget for the iterative fallback
};

// argmin_{y in set} D_f(y, x). Members are returned unchanged. Routes:
//   halfspace / hyperplane   closed form when grad f is linear, otherwise a
//                            scalar root-find on the dual multiplier
//   box, separable f         componentwise clamp
//   simplex                  normalization (NegativeEntropy) or the sorted
//                            threshold rule (SquaredNorm)
//   everything else          projected gradient on y -> D_f(y, x) with the
//                            Euclidean projection as inner step
Vec bregman_project(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                    const ProjectOptions& opts = {});

// max_{y in probes} <grad f(x) - grad f(z), y - z>; <= 0 certifies z as the
// projection of x. ArgumentError when a probe is not a member.
double projection_vi_residual(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                              const Vec& z, const std::vector<Vec>& probes);

// D_f(y, x) - D_f(y, P x) - D_f(P x, x) for a member y; nonnegative up to
// solver error.
double pythagoras_gap(const LegendreFunction& f, const ConvexSet& set, const Vec& x, const Vec& y,
                      const ProjectOptions& opts = {});

// A member of the set interior to dom f, as close to `near` as cheaply
// possible. Used to seed the iterative routines here and in the resolvent
// solvers. InfeasibleError when the set never meets int dom f.
Vec feasible_interior_start(const LegendreFunction& f, const ConvexSet& set, const Vec& near);

}  // namespace bregkit
