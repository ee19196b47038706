#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bregkit/equilibrium.hpp"
#include "bregkit/projection.hpp"

namespace bregkit {

// The operator pool the iteration schemes draw from. Every kind is Bregman
// quasi-nonexpansive with respect to its generating f: points of the fixed
// set never get further away in D_f under one application.
class QbneOperator {
 public:
  enum class Kind { Projection, Resolvent, Composition };

  static QbneOperator projection(LegendreFunction f, ConvexSet target);
  static QbneOperator resolvent(LegendreFunction f, Bifunction g, double tol = 1e-10);
  // Factors applied left to right: composition({S, T}) maps x to T(S(x)).
  static QbneOperator composition(std::vector<QbneOperator> factors);

  Kind kind() const;
  int dim() const;
  Vec apply(const Vec& x) const;

  // A point the operator is known to fix (the target-set witness for
  // projections; unset for resolvents unless supplied via with_fixed_point).
  const std::optional<Vec>& known_fixed_point() const;
  QbneOperator with_fixed_point(Vec p) const;

  const ConvexSet& target_set() const;      // Projection only
  const Bifunction& bifunction() const;     // Resolvent only
  const std::vector<QbneOperator>& factors() const;  // Composition only

  std::string describe() const;

 private:
  struct Impl;
  explicit QbneOperator(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// family[(n - 1) mod N] for 1-based n: iteration 1 uses the first member.
const QbneOperator& cyclic_select(const std::vector<QbneOperator>& family, long n);

// D_f(p, x) - D_f(p, T x) for a fixed point p of T; nonnegative when T is
// Bregman quasi-nonexpansive. ArgumentError unless T actually fixes p.
double qbne_gap(const QbneOperator& T, const LegendreFunction& f, const Vec& p, const Vec& x);

}  // namespace bregkit
