#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bregkit/types.hpp"

namespace bregkit {

// Default additive slack when testing membership.
inline constexpr double kMembershipTol = 1e-9;

// Closed convex subsets of R^d, each with a membership test, an interior-ish
// witness point, and a Euclidean projection. The Euclidean projections are
// closed form except for Intersection, which runs Dykstra's alternating
// scheme over its members.
class ConvexSet {
 public:
  enum class Kind { Halfspace, Hyperplane, Box, Ball, Simplex, Intersection };

  static ConvexSet halfspace(Vec normal, double offset);   // <a, x> <= b
  static ConvexSet hyperplane(Vec normal, double offset);  // <a, x> == b
  static ConvexSet box(Vec lo, Vec hi);                    // lo <= x <= hi
  static ConvexSet ball(Vec center, double radius);        // ||x - c|| <= r
  static ConvexSet simplex(int dim, double scale);         // x >= 0, sum x = s
  // Fails with InfeasibleError when no common point can be certified.
  static ConvexSet intersection(std::vector<ConvexSet> members,
                                std::optional<Vec> witness = std::nullopt);

  Kind kind() const;
  int dim() const;

  // Largest constraint violation at x; <= 0 exactly on the set.
  double violation(const Vec& x) const;
  bool contains(const Vec& x, double tol = kMembershipTol) const;

  // A point of the set, strictly inside whenever the set has interior.
  const Vec& witness() const;

  Vec euclidean_project(const Vec& x) const;

  // Extreme points where finitely many exist (boxes, simplices, and whatever
  // member vertices of an intersection still belong to it); at most cap.
  std::vector<Vec> vertices(int cap = 64) const;

  // Deterministic probe cloud: vertices, then n_interior points inside and
  // n_boundary points on (or near) the boundary, all members of the set.
  std::vector<Vec> probe_points(int n_interior, int n_boundary, std::uint64_t seed) const;

  // Upper bound on the set diameter, +inf when unbounded.
  double diameter_hint() const;

  std::string describe() const;

  // Shape accessors; each throws ArgumentError when asked of the wrong kind.
  const Vec& normal() const;
  double offset() const;
  const Vec& lower() const;
  const Vec& upper() const;
  const Vec& center() const;
  double radius() const;
  double scale() const;
  const std::vector<ConvexSet>& members() const;

 private:
  struct Impl;
  explicit ConvexSet(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Euclidean projection onto {x >= 0, sum x = scale} by the sorted threshold
// rule. Exposed separately because several routines use it directly.
Vec project_simplex_euclidean(const Vec& v, double scale);

}  // namespace bregkit
