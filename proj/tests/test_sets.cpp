#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "bregkit/errors.hpp"
#include "bregkit/sets.hpp"
#include "test_support.hpp"

using bregkit::ConvexSet;
using bregkit::Vec;
using testsup::maxdiff;
using testsup::v2;
using testsup::v3;

TEST_CASE("halfspace membership, violation, projection") {
  auto h = ConvexSet::halfspace(v2(1.0, 2.0), 0.8);
  CHECK(h.contains(v2(0.0, 0.0)));
  CHECK(h.violation(v2(1.0, 0.5)) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(!h.contains(v2(1.0, 0.5)));
  // Projection subtracts violation/|a|^2 * a: (1,.5) - (1.2/5)(1,2) = (.76, .02).
  CHECK(maxdiff(h.euclidean_project(v2(1.0, 0.5)), v2(0.76, 0.02)) <= 1e-15);
  CHECK(maxdiff(h.euclidean_project(v2(-1.0, 0.2)), v2(-1.0, 0.2)) == 0.0);
  CHECK(h.contains(h.witness()));
  CHECK(std::isinf(h.diameter_hint()));
}

TEST_CASE("hyperplane projection lands on the plane from both sides") {
  auto p = ConvexSet::hyperplane(v2(1.0, 2.0), 0.8);
  CHECK(p.violation(v2(0.0, 0.0)) == doctest::Approx(0.8).epsilon(1e-15));
  const Vec z = p.euclidean_project(v2(1.0, 0.5));
  CHECK(maxdiff(z, v2(0.76, 0.02)) <= 1e-15);
  const Vec z2 = p.euclidean_project(v2(-2.0, 0.0));
  CHECK(std::abs(z2.dot(v2(1.0, 2.0)) - 0.8) <= 1e-15);
}

TEST_CASE("box clamp, vertices, diameter") {
  auto b = ConvexSet::box(v2(-1.0, 0.0), v2(2.0, 1.0));
  CHECK(maxdiff(b.euclidean_project(v2(5.0, -3.0)), v2(2.0, 0.0)) == 0.0);
  CHECK(b.contains(v2(0.0, 0.5)));
  CHECK(b.violation(v2(3.0, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.vertices().size() == 4);
  CHECK(b.diameter_hint() >= std::sqrt(10.0) - 1e-12);
  CHECK(b.diameter_hint() <= 10.0);
  CHECK(maxdiff(b.lower(), v2(-1.0, 0.0)) == 0.0);
  CHECK(maxdiff(b.upper(), v2(2.0, 1.0)) == 0.0);
}

TEST_CASE("ball projection is the radial pull-in") {
  auto s = ConvexSet::ball(v2(0.3, -0.2), 1.2);
  const Vec z = s.euclidean_project(v2(2.1, 1.4));
  CHECK(maxdiff(z, v2(1.1968911824203916, 0.5972366065959037)) <= 1e-14);
  CHECK(maxdiff(s.euclidean_project(v2(0.5, 0.0)), v2(0.5, 0.0)) == 0.0);
  CHECK(s.diameter_hint() >= 2.4 - 1e-12);
  CHECK(s.diameter_hint() <= 5.0);
  CHECK(s.radius() == 1.2);
}

TEST_CASE("simplex projection via the sorted threshold rule") {
  CHECK(maxdiff(bregkit::project_simplex_euclidean(v3(0.8, 0.3, -0.1), 1.0),
                v3(0.75, 0.25, 0.0)) <= 1e-15);
  // Already a member: unchanged.
  CHECK(maxdiff(bregkit::project_simplex_euclidean(v3(0.2, 0.3, 0.5), 1.0),
                v3(0.2, 0.3, 0.5)) <= 1e-15);
  auto s = ConvexSet::simplex(3, 1.0);
  CHECK(maxdiff(s.euclidean_project(v3(0.8, 0.3, -0.1)), v3(0.75, 0.25, 0.0)) <= 1e-15);
  CHECK(s.vertices().size() == 3);
  CHECK(s.contains(v3(0.2, 0.3, 0.5)));
  CHECK(!s.contains(v3(0.5, 0.6, -0.1)));
  CHECK(s.scale() == 1.0);
}

TEST_CASE("intersection projection agrees with the two-constraint KKT answer") {
  // Box [0,1]^2 meets {x + y <= 1.2}; projecting (2, 0.4) activates the box
  // face x = 1 and the halfspace, giving (1, 0.2).
  auto inter = ConvexSet::intersection(
      {ConvexSet::box(v2(0.0, 0.0), v2(1.0, 1.0)), ConvexSet::halfspace(v2(1.0, 1.0), 1.2)});
  const Vec z = inter.euclidean_project(v2(2.0, 0.4));
  CHECK(maxdiff(z, v2(1.0, 0.2)) <= 1e-9);
  CHECK(inter.contains(z, 1e-9));
  CHECK(inter.contains(inter.witness()));
  CHECK(inter.members().size() == 2);
}

TEST_CASE("infeasible intersection is rejected at construction") {
  CHECK_THROWS_AS(ConvexSet::intersection({ConvexSet::halfspace(v2(1.0, 0.0), -1.0),
                                           ConvexSet::halfspace(v2(-1.0, 0.0), -1.0)}),
                  bregkit::InfeasibleError);
}

TEST_CASE("probe points are members and replay deterministically") {
  for (const auto& set :
       {ConvexSet::box(v2(-1.0, -1.0), v2(1.0, 1.0)), ConvexSet::ball(v2(0.0, 0.0), 2.0),
        ConvexSet::simplex(2, 1.0), ConvexSet::halfspace(v2(1.0, 1.0), 1.0)}) {
    const auto pts = set.probe_points(8, 8, 99);
    CHECK(pts.size() >= 16);
    for (const auto& p : pts) CHECK(set.contains(p));
    const auto replay = set.probe_points(8, 8, 99);
    REQUIRE(replay.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(maxdiff(pts[i], replay[i]) == 0.0);
  }
}

TEST_CASE("shape accessors reject the wrong kind") {
  auto b = ConvexSet::box(v2(0.0, 0.0), v2(1.0, 1.0));
  CHECK_THROWS_AS(b.normal(), bregkit::ArgumentError);
  CHECK_THROWS_AS(b.radius(), bregkit::ArgumentError);
  auto h = ConvexSet::halfspace(v2(1.0, 0.0), 1.0);
  CHECK_THROWS_AS(h.lower(), bregkit::ArgumentError);
  CHECK(!h.describe().empty());
}

TEST_CASE("degenerate boxes act as singletons") {
  auto s = ConvexSet::box(v2(0.25, -1.0), v2(0.25, -1.0));
  CHECK(maxdiff(s.euclidean_project(v2(9.0, 9.0)), v2(0.25, -1.0)) == 0.0);
  CHECK(s.diameter_hint() <= 1e-12);
  CHECK(maxdiff(s.witness(), v2(0.25, -1.0)) == 0.0);
}
