#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bregkit/legendre.hpp"
#include "bregkit/sets.hpp"

namespace bregkit {

// Convex cost used by the ProximalConvex bifunction family. Deliberately
// restricted to shapes whose Euclidean proximal map is exact, so the inner
// solvers have something closed form to lean on.
class ConvexHandle {
 public:
  enum class Kind { L1, Linear, MaxCoordinate };

  static ConvexHandle l1(double weight);               // w * sum |y_i|
  static ConvexHandle linear(Vec cost);                // <c, y>
  static ConvexHandle max_coordinate(double weight);   // w * max_i y_i

  Kind kind() const;
  double weight() const;
  const Vec& cost() const;

  double value(const Vec& y) const;
  Vec subgradient(const Vec& y) const;
  // argmin_u 0.5||u - v||^2 + tau * h(u); always exact for these shapes.
  Vec prox(const Vec& v, double tau) const;

  std::string describe() const;

 private:
  struct Impl;
  explicit ConvexHandle(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Equilibrium bifunction g(x, y) on a feasible set C. Two families:
//   LinearMonotone   g(x, y) = <Ax + c, y - x> with A + A' positive
//                    semidefinite
//   ProximalConvex   g(x, y) = h(y) - h(x) for a ConvexHandle h
class Bifunction {
 public:
  enum class Kind { LinearMonotone, ProximalConvex };

  static Bifunction linear_monotone(Mat a, Vec c, ConvexSet set);
  // Skips the monotonicity validation; exists so the axiom checker can be
  // pointed at a deliberately broken operator.
  static Bifunction linear_monotone_unchecked(Mat a, Vec c, ConvexSet set);
  static Bifunction proximal_convex(ConvexHandle h, ConvexSet set);

  Kind kind() const;
  int dim() const;
  double eval(const Vec& x, const Vec& y) const;
  const ConvexSet& feasible_set() const;
  const Mat& matrix() const;        // LinearMonotone
  const Vec& shift() const;         // LinearMonotone
  const ConvexHandle& handle() const;  // ProximalConvex

  // Shared deterministic probe cloud over the feasible set.
  const std::vector<Vec>& probes() const;

  std::string describe() const;

 private:
  struct Impl;
  explicit Bifunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

struct ResolveOptions {
  double tol = 1e-10;       // optimality-condition residual over the probes
  int max_iters = 50000;
  std::optional<Vec> start;  // inner iteration start, defaults near x
};

// The resolvent point z in C with g(z, y) + <grad f(z) - grad f(x), y - z> >= 0
// for all y in C. Affine g reduces to a dual shift plus one projection; the
// ProximalConvex family runs forward-backward steps with exact proximal maps;
// general LinearMonotone runs an extragradient loop.
Vec resolve(const LegendreFunction& f, const Bifunction& g, const Vec& x,
            const ResolveOptions& opts = {});

// D_f(q, x) - D_f(q, Res x) - D_f(Res x, x) for an equilibrium point q;
// nonnegative up to solver error.
double resolvent_inequality_gap(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                                const Vec& q, const ResolveOptions& opts = {});

// <grad f(x) - grad f(y) - grad f(Res x) + grad f(Res y), Res x - Res y>;
// nonnegative when the resolvent is firmly nonexpansive in the D_f sense.
double firmly_nonexpansive_gap(const LegendreFunction& f, const Bifunction& g, const Vec& x,
                               const Vec& y, const ResolveOptions& opts = {});

// max(0, max_y -g(z, y)) over a deterministic probe cloud; zero certifies z
// as an equilibrium point up to probe coverage.
double ep_residual(const Bifunction& g, const Vec& z, int n_probes = 128);

struct AxiomCheck {
  std::string axiom;
  bool pass = false;
  double worst = 0.0;
  Vec witness_x, witness_y;
  std::string detail;
};

struct AxiomReport {
  bool all_pass = false;
  std::vector<AxiomCheck> checks;
};

// Randomized sweep of the standard equilibrium axioms: vanishing diagonal,
// monotonicity, continuity along segments, convexity in the second slot.
AxiomReport check_axioms(const Bifunction& g, int n_samples, std::uint64_t seed);

}  // namespace bregkit
