#include "doctest.h"

#include <cmath>
#include <vector>

#include "bregkit/equilibrium.hpp"
#include "bregkit/errors.hpp"
#include "test_support.hpp"

using bregkit::Bifunction;
using bregkit::ConvexHandle;
using bregkit::ConvexSet;
using bregkit::LegendreFunction;
using bregkit::Mat;
using bregkit::ResolveOptions;
using bregkit::Vec;
using testsup::maxdiff;
using testsup::v2;
using testsup::v3;

namespace {
ConvexSet box2(double r) { return ConvexSet::box(v2(-r, -r), v2(r, r)); }
}  // namespace

TEST_CASE("l1 handle: value, subgradient, soft threshold") {
  auto h = ConvexHandle::l1(0.5);
  CHECK(h.value(v3(1.0, -2.0, 0.5)) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(maxdiff(h.subgradient(v3(1.0, -2.0, 0.5)), v3(0.5, -0.5, 0.5)) == 0.0);
  // prox threshold is tau * weight = 0.3.
  CHECK(maxdiff(h.prox(v3(1.5, -0.2, 0.05), 0.6), v3(1.2, 0.0, 0.0)) <= 1e-15);
}

TEST_CASE("linear handle: value and shifted prox") {
  auto h = ConvexHandle::linear(v2(2.0, -1.0));
  CHECK(h.value(v2(0.5, 0.5)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(maxdiff(h.subgradient(v2(9.0, 9.0)), v2(2.0, -1.0)) == 0.0);
  CHECK(maxdiff(h.prox(v2(1.0, 1.0), 0.25), v2(0.5, 1.25)) <= 1e-15);
}

TEST_CASE("max-coordinate handle: threshold prox") {
  auto h = ConvexHandle::max_coordinate(1.0);
  CHECK(h.value(v3(2.0, 1.5, -3.0)) == 2.0);
  // tau * w = 0.8: the top two coordinates pool at m = 1.35.
  CHECK(maxdiff(h.prox(v3(2.0, 1.5, -3.0), 0.8), v3(1.35, 1.35, -3.0)) <= 1e-14);
  // Large tau pulls every coordinate to the common mean minus tau/n effects;
  // the prox must stay monotone in tau and below the input max.
  const Vec z = h.prox(v3(2.0, 1.5, -3.0), 3.0);
  CHECK(z.maxCoeff() < 2.0);
}

TEST_CASE("linear monotone bifunction evaluates <Ax + c, y - x>") {
  Mat a = Mat::Identity(2, 2);
  auto g = Bifunction::linear_monotone(a, v2(0.5, 0.0), box2(5.0));
  // g((1,2), (3,1)) = <(1.5, 2), (2, -1)> = 1.
  CHECK(g.eval(v2(1.0, 2.0), v2(3.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.eval(v2(1.0, 2.0), v2(1.0, 2.0)) == 0.0);
  CHECK(g.dim() == 2);
  CHECK(maxdiff(g.shift(), v2(0.5, 0.0)) == 0.0);
}

TEST_CASE("antimonotone matrices are rejected unless unchecked") {
  Mat a = -Mat::Identity(2, 2);
  CHECK_THROWS_AS(Bifunction::linear_monotone(a, Vec::Zero(2), box2(1.0)),
                  bregkit::ArgumentError);
  auto g = Bifunction::linear_monotone_unchecked(a, Vec::Zero(2), box2(1.0));
  CHECK(g.kind() == Bifunction::Kind::LinearMonotone);
}

TEST_CASE("pure-shift resolvent is a translated projection") {
  auto f = LegendreFunction::squared_norm(2);
  auto g = Bifunction::linear_monotone(Mat::Zero(2, 2), v2(1.0, -1.0), box2(2.0));
  // z = clamp(x - c): (3,2) - (1,-1) = (2,3) -> (2,2).
  CHECK(maxdiff(bregkit::resolve(f, g, v2(3.0, 2.0)), v2(2.0, 2.0)) <= 1e-12);
}

TEST_CASE("strongly monotone linear resolvent matches (A + I)^{-1}(x - c)") {
  auto f = LegendreFunction::squared_norm(2);
  auto g = Bifunction::linear_monotone(Mat::Identity(2, 2), v2(1.0, -1.0), box2(10.0));
  const Vec z = bregkit::resolve(f, g, v2(3.0, 2.0));
  CHECK(maxdiff(z, v2(1.0, 1.5)) <= 1e-8);
}

TEST_CASE("skew linear resolvent still solves the interior optimality system") {
  Mat a(2, 2);
  a << 1.0, 1.0, -1.0, 1.0;
  auto f = LegendreFunction::squared_norm(2);
  auto g = Bifunction::linear_monotone(a, v2(1.0, -1.0), box2(10.0));
  // (A + I) z = x - c with x = (3, 2): z = (0.2, 1.6).
  const Vec z = bregkit::resolve(f, g, v2(3.0, 2.0));
  CHECK(maxdiff(z, v2(0.2, 1.6)) <= 1e-8);
}

TEST_CASE("proximal-convex resolvent under squared norm is the combined prox") {
  auto f = LegendreFunction::squared_norm(3);
  SUBCASE("max coordinate, wide box: interior threshold") {
    auto g = Bifunction::proximal_convex(ConvexHandle::max_coordinate(0.8),
                                         ConvexSet::box(v3(-5, -5, -5), v3(5, 5, 5)));
    CHECK(maxdiff(bregkit::resolve(f, g, v3(2.0, 1.5, -3.0)), v3(1.35, 1.35, -3.0)) <= 1e-10);
  }
  SUBCASE("max coordinate, tight box: threshold capped by the box face") {
    auto g = Bifunction::proximal_convex(ConvexHandle::max_coordinate(0.8),
                                         ConvexSet::box(v3(-1, -1, -1), v3(1, 1, 1)));
    CHECK(maxdiff(bregkit::resolve(f, g, v3(2.0, 1.5, -3.0)), v3(1.0, 1.0, -1.0)) <= 1e-10);
  }
  SUBCASE("l1 over a positive box") {
    auto fl = LegendreFunction::squared_norm(2);
    auto g = Bifunction::proximal_convex(ConvexHandle::l1(0.6),
                                         ConvexSet::box(v2(0.1, 0.1), v2(2.0, 2.0)));
    CHECK(maxdiff(bregkit::resolve(fl, g, v2(1.5, 0.05)), v2(0.9, 0.1)) <= 1e-10);
  }
}

TEST_CASE("entropy resolvent of a linear cost reweights and renormalizes") {
  auto f = LegendreFunction::negative_entropy(3);
  auto g = Bifunction::proximal_convex(ConvexHandle::linear(v3(0.0, 0.4, 0.9)),
                                       ConvexSet::simplex(3, 1.0));
  const Vec z = bregkit::resolve(f, g, v3(0.2, 0.3, 0.5));
  CHECK(maxdiff(z, v3(0.33091717265871096, 0.3327306216158561, 0.336352205725433)) <= 1e-12);
}

TEST_CASE("resolvent outputs are equilibrium-consistent") {
  auto f = LegendreFunction::squared_norm(2);
  auto g = Bifunction::linear_monotone(Mat::Identity(2, 2), Vec::Zero(2), box2(5.0));
  const Vec z = bregkit::resolve(f, g, v2(4.0, -3.0));
  // The resolvent inequality must hold at the known equilibrium point 0.
  CHECK(bregkit::resolvent_inequality_gap(f, g, v2(4.0, -3.0), Vec::Zero(2)) >= -1e-7);
  // Firm nonexpansiveness across a pair of inputs.
  CHECK(bregkit::firmly_nonexpansive_gap(f, g, v2(4.0, -3.0), v2(-1.0, 2.0)) >= -1e-9);
  // Equilibrium residual: zero at the solution, positive away from it.
  CHECK(bregkit::ep_residual(g, Vec::Zero(2)) == 0.0);
  CHECK(bregkit::ep_residual(g, v2(2.0, 2.0)) > 1e-3);
  CHECK(maxdiff(bregkit::resolve(f, g, Vec::Zero(2)), Vec::Zero(2)) <= 1e-10);
  (void)z;
}

TEST_CASE("resolve honors an explicit start and tolerance") {
  auto f = LegendreFunction::squared_norm(2);
  Mat a(2, 2);
  a << 1.0, 1.0, -1.0, 1.0;
  auto g = Bifunction::linear_monotone(a, Vec::Zero(2), box2(10.0));
  ResolveOptions opts;
  opts.tol = 1e-12;
  opts.start = v2(0.1, 0.1);
  const Vec z = bregkit::resolve(f, g, v2(3.0, 2.0), opts);
  // (A + I) z = (3, 2) with A + I = [[2,1],[-1,2]]: z = (4/5, 7/5).
  CHECK(maxdiff(z, v2(0.8, 1.4)) <= 1e-9);
}

TEST_CASE("axiom checker passes valid bifunctions and catches the broken one") {
  auto good = Bifunction::linear_monotone(Mat::Identity(2, 2), v2(0.3, -0.2), box2(2.0));
  auto report = bregkit::check_axioms(good, 60, 17);
  CHECK(report.all_pass);
  CHECK(report.checks.size() >= 4);

  auto bad = Bifunction::linear_monotone_unchecked(-Mat::Identity(2, 2), Vec::Zero(2), box2(2.0));
  auto bad_report = bregkit::check_axioms(bad, 60, 17);
  CHECK(!bad_report.all_pass);
  bool monotonicity_flagged = false;
  for (const auto& c : bad_report.checks)
    if (!c.pass && c.axiom.find("monoton") != std::string::npos) monotonicity_flagged = true;
  CHECK(monotonicity_flagged);
}

TEST_CASE("proximal bifunction evaluates h(y) - h(x)") {
  auto g = Bifunction::proximal_convex(ConvexHandle::l1(1.0), box2(3.0));
  CHECK(g.eval(v2(1.0, -1.0), v2(0.5, 0.25)) == doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(g.handle().kind() == ConvexHandle::Kind::L1);
  CHECK(!g.probes().empty());
  for (const auto& p : g.probes()) CHECK(g.feasible_set().contains(p));
}
