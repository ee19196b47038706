#include "doctest.h"

#include <vector>

#include "bregkit/errors.hpp"
#include "bregkit/operators.hpp"
#include "test_support.hpp"

using bregkit::Bifunction;
using bregkit::ConvexSet;
using bregkit::LegendreFunction;
using bregkit::Mat;
using bregkit::QbneOperator;
using bregkit::Vec;
using testsup::maxdiff;
using testsup::v2;

TEST_CASE("projection operator applies the Bregman projection") {
  auto f = LegendreFunction::squared_norm(2);
  auto op = QbneOperator::projection(f, ConvexSet::halfspace(v2(1.0, 2.0), 0.8));
  CHECK(op.kind() == QbneOperator::Kind::Projection);
  CHECK(maxdiff(op.apply(v2(1.0, 0.5)), v2(0.76, 0.02)) <= 1e-14);
  // The target witness is a ready-made fixed point.
  REQUIRE(op.known_fixed_point().has_value());
  CHECK(maxdiff(op.apply(*op.known_fixed_point()), *op.known_fixed_point()) <= 1e-12);
  CHECK(op.target_set().kind() == ConvexSet::Kind::Halfspace);
}

TEST_CASE("resolvent operator applies the resolvent") {
  auto f = LegendreFunction::squared_norm(2);
  auto box = ConvexSet::box(v2(-10.0, -10.0), v2(10.0, 10.0));
  auto g = Bifunction::linear_monotone(Mat::Identity(2, 2), v2(1.0, -1.0), box);
  auto op = QbneOperator::resolvent(f, g, 1e-12);
  CHECK(maxdiff(op.apply(v2(3.0, 2.0)), v2(1.0, 1.5)) <= 1e-8);
  CHECK(!op.known_fixed_point().has_value());
  auto tagged = op.with_fixed_point(v2(-1.0, 1.0));  // z with (A+I)z = z - c
  REQUIRE(tagged.known_fixed_point().has_value());
  CHECK(maxdiff(*tagged.known_fixed_point(), v2(-1.0, 1.0)) == 0.0);
  CHECK(op.bifunction().kind() == Bifunction::Kind::LinearMonotone);
}

TEST_CASE("composition applies factors left to right") {
  auto f = LegendreFunction::squared_norm(2);
  auto s = QbneOperator::projection(f, ConvexSet::hyperplane(v2(1.0, 0.0), 0.0));
  auto t = QbneOperator::projection(f, ConvexSet::halfspace(v2(1.0, 1.0), 0.5));
  const Vec x = v2(2.0, 3.0);
  // The halfspace projection runs a scalar dual root-find, so allow its tol.
  // T(S(x)): S zeroes the first coordinate, T pulls (0,3) back to (-1.25, 1.75).
  CHECK(maxdiff(QbneOperator::composition({s, t}).apply(x), v2(-1.25, 1.75)) <= 1e-10);
  // S(T(x)): T maps (2,3) to (-0.25, 0.75), then S zeroes the first slot.
  CHECK(maxdiff(QbneOperator::composition({t, s}).apply(x), v2(0.0, 0.75)) <= 1e-10);
  CHECK(QbneOperator::composition({s, t}).factors().size() == 2);
}

TEST_CASE("cyclic selection is 1-based over the family") {
  auto f = LegendreFunction::squared_norm(2);
  std::vector<QbneOperator> family = {
      QbneOperator::projection(f, ConvexSet::halfspace(v2(1.0, 0.0), 1.0)),
      QbneOperator::projection(f, ConvexSet::halfspace(v2(0.0, 1.0), 1.0))};
  CHECK(&bregkit::cyclic_select(family, 1) == &family[0]);
  CHECK(&bregkit::cyclic_select(family, 2) == &family[1]);
  CHECK(&bregkit::cyclic_select(family, 3) == &family[0]);
  CHECK(&bregkit::cyclic_select(family, 102) == &family[1]);
}

TEST_CASE("qbne gap is nonnegative at fixed points") {
  auto f = LegendreFunction::squared_norm(2);
  auto op = QbneOperator::projection(f, ConvexSet::halfspace(v2(1.0, 0.0), 1.0));
  // D(0, x) - D(0, Tx) with x = (3,4), Tx = (1,4): 12.5 - 8.5 = 4.
  CHECK(bregkit::qbne_gap(op, f, Vec::Zero(2), v2(3.0, 4.0)) ==
        doctest::Approx(4.0).epsilon(1e-9));
  CHECK(bregkit::qbne_gap(op, f, Vec::Zero(2), v2(0.2, -0.3)) >= 0.0);
  // Points the operator moves are rejected as reference fixed points.
  CHECK_THROWS_AS(bregkit::qbne_gap(op, f, v2(2.0, 0.0), v2(3.0, 4.0)),
                  bregkit::ArgumentError);
}

TEST_CASE("operators expose dimensions and descriptions") {
  auto f = LegendreFunction::squared_norm(2);
  auto op = QbneOperator::projection(f, ConvexSet::ball(v2(0.0, 0.0), 1.0));
  CHECK(op.dim() == 2);
  CHECK(!op.describe().empty());
  CHECK_THROWS_AS(op.bifunction(), bregkit::ArgumentError);
  CHECK_THROWS_AS(op.factors(), bregkit::ArgumentError);
}
