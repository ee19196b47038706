#include "bregkit/instances.hpp"

#include "bregkit/errors.hpp"

namespace bregkit {

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ConvexSet singleton(const Vec& p) { return ConvexSet::box(p, p); }

// Everything reduces to x_{n+1} = P_C((1 - alpha_n) x_n): the bifunction is
// identically zero and the operator acts as the identity on C.
ProblemInstance degenerate_identity(int d) {
  auto f = LegendreFunction::squared_norm(d);
  auto box = ConvexSet::box(Vec::Constant(d, -1.0), Vec::Constant(d, 1.0));
  return ProblemInstance{
      "degenerate-identity",
      f,
      box,
      {Bifunction::linear_monotone(Mat::Zero(d, d), Vec::Zero(d), box)},
      {QbneOperator::projection(f, box)},
      Vec::Zero(d),
      box,  // every feasible point solves this one
      std::nullopt,
  };
}

// Strictly monotone linear bifunction pins the solution to the origin; the
// two halfspace projections both fix it, so the common solution set is {0}.
ProblemInstance euclidean_showcase() {
  auto f = LegendreFunction::squared_norm(2);
  auto box = ConvexSet::box(Vec::Constant(2, -5.0), Vec::Constant(2, 5.0));
  return ProblemInstance{
      "euclidean-showcase",
      f,
      box,
      {Bifunction::linear_monotone(Mat::Identity(2, 2), Vec::Zero(2), box)},
      {QbneOperator::projection(f, ConvexSet::halfspace(vec2(1.0, 0.0), 1.0)),
       QbneOperator::projection(f, ConvexSet::halfspace(vec2(0.0, 1.0), 1.0))},
      Vec::Zero(2),
      singleton(Vec::Zero(2)),
      std::nullopt,
  };
}

// Linear cost over the probability simplex under the entropy geometry. The
// cheapest vertex e_1 is the unique equilibrium point; the cost is scaled so
// the losing coordinates stay above the double-precision floor for at least
// 10^4 iterations. The anchor moves to the barycenter because the origin is
// outside dom f here.
ProblemInstance entropy_simplex() {
  auto f = LegendreFunction::negative_entropy(3);
  auto simplex = ConvexSet::simplex(3, 1.0);
  Vec cost(3);
  cost << 0.0, 0.03, 0.05;
  Vec ref = Vec::Unit(3, 0);
  return ProblemInstance{
      "entropy-simplex",
      f,
      simplex,
      {Bifunction::proximal_convex(ConvexHandle::linear(cost), simplex)},
      {QbneOperator::projection(f, simplex)},
      ref,
      singleton(ref),
      Vec::Constant(3, 1.0 / 3.0),
  };
}

// The solution set is a whole segment, placed so that projecting the anchor
// and projecting the usual start x1 = (4, 3) give different endpoints. Built
// to separate the two candidate limit points.
ProblemInstance omega_segment() {
  auto f = LegendreFunction::squared_norm(2);
  auto box = ConvexSet::box(Vec::Constant(2, -5.0), Vec::Constant(2, 5.0));
  auto segment = ConvexSet::box(vec2(1.0, 0.0), vec2(3.0, 0.0));
  return ProblemInstance{
      "omega-segment",
      f,
      box,
      {Bifunction::linear_monotone(Mat::Zero(2, 2), Vec::Zero(2), box)},
      {QbneOperator::projection(f, segment)},
      vec2(1.0, 0.0),
      segment,
      std::nullopt,
  };
}

// Same monotone bifunction as the showcase but with an affine operator
// (hyperplane projection), so every stage of the baseline scheme has an
// explicit matrix form to compare against.
ProblemInstance kumam_linear() {
  auto f = LegendreFunction::squared_norm(2);
  auto box = ConvexSet::box(Vec::Constant(2, -5.0), Vec::Constant(2, 5.0));
  return ProblemInstance{
      "kumam-linear",
      f,
      box,
      {Bifunction::linear_monotone(Mat::Identity(2, 2), Vec::Zero(2), box)},
      {QbneOperator::projection(f, ConvexSet::hyperplane(vec2(1.0, 0.0), 0.0))},
      Vec::Zero(2),
      singleton(Vec::Zero(2)),
      std::nullopt,
  };
}

}  // namespace

const std::vector<InstanceInfo>& builtin_instances() {
  static const std::vector<InstanceInfo> catalog = {
      {"degenerate-identity", 2, false,
       "squared norm on a box, zero bifunction, identity-on-box operator; "
       "closed-form decay x1/n"},
      {"euclidean-showcase", 2, true,
       "monotone linear bifunction plus two halfspace projections; unique "
       "solution at the origin"},
      {"entropy-simplex", 3, true,
       "entropy geometry on the probability simplex with a linear cost; "
       "solution at the cheapest vertex"},
      {"omega-segment", 2, true,
       "zero bifunction with a segment of solutions; separates the two "
       "candidate limit projections"},
      {"kumam-linear", 2, true,
       "monotone linear bifunction with an affine hyperplane operator; every "
       "baseline step has a matrix oracle"},
  };
  return catalog;
}

ProblemInstance generate_instance(const std::string& name, int d, std::uint64_t /*seed*/) {
  const InstanceInfo* info = nullptr;
  for (const auto& entry : builtin_instances())
    if (entry.name == name) info = &entry;
  if (info == nullptr) throw ArgumentError("generate_instance: unknown instance " + name);
  if (d == 0) d = info->default_dim;
  if (d < 1) throw ArgumentError("generate_instance: dimension must be >= 1");
  if (info->fixed_dim && d != info->default_dim)
    throw ArgumentError("generate_instance: " + name + " is fixed at d = " +
                        std::to_string(info->default_dim));

  ProblemInstance prob = [&] {
    if (name == "degenerate-identity") return degenerate_identity(d);
    if (name == "euclidean-showcase") return euclidean_showcase();
    if (name == "entropy-simplex") return entropy_simplex();
    if (name == "omega-segment") return omega_segment();
    return kumam_linear();
  }();
  validate_reference(prob);
  return prob;
}

}  // namespace bregkit
