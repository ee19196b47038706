#include "doctest.h"

#include "bregkit/errors.hpp"
#include "bregkit/instances.hpp"
#include "test_support.hpp"

using bregkit::Vec;
using testsup::maxdiff;
using testsup::v2;

TEST_CASE("every catalog entry generates and self-validates") {
  const auto& catalog = bregkit::builtin_instances();
  REQUIRE(!catalog.empty());
  for (const auto& info : catalog) {
    auto prob = bregkit::generate_instance(info.name);
    CHECK(prob.name == info.name);
    CHECK(prob.dim() == info.default_dim);
    CHECK(!prob.bifunctions.empty());
    CHECK(!prob.operators.empty());
    bregkit::validate_reference(prob);
    if (prob.reference_solution) {
      CHECK(prob.constraint.contains(*prob.reference_solution, 1e-9));
    }
  }
}

TEST_CASE("generation is a pure function of name, dim, seed") {
  auto a = bregkit::generate_instance("euclidean-showcase", 0, 1);
  auto b = bregkit::generate_instance("euclidean-showcase", 0, 99);
  REQUIRE(a.reference_solution.has_value());
  REQUIRE(b.reference_solution.has_value());
  CHECK(maxdiff(*a.reference_solution, *b.reference_solution) == 0.0);
  CHECK(maxdiff(a.constraint.witness(), b.constraint.witness()) == 0.0);
}

TEST_CASE("dimension handling") {
  auto d5 = bregkit::generate_instance("degenerate-identity", 5);
  CHECK(d5.dim() == 5);
  CHECK_THROWS_AS(bregkit::generate_instance("euclidean-showcase", 7),
                  bregkit::ArgumentError);
  CHECK_THROWS_AS(bregkit::generate_instance("no-such-instance"), bregkit::ArgumentError);
}

TEST_CASE("showcase and segment geometry match their descriptions") {
  auto showcase = bregkit::generate_instance("euclidean-showcase");
  REQUIRE(showcase.solution_set.has_value());
  CHECK(showcase.solution_set->contains(Vec::Zero(2)));
  CHECK(maxdiff(*showcase.reference_solution, Vec::Zero(2)) == 0.0);

  auto segment = bregkit::generate_instance("omega-segment");
  REQUIRE(segment.solution_set.has_value());
  CHECK(segment.solution_set->contains(v2(2.0, 0.0)));
  CHECK(!segment.solution_set->contains(v2(2.0, 0.5)));

  auto entropy = bregkit::generate_instance("entropy-simplex");
  REQUIRE(entropy.default_anchor.has_value());
  CHECK(entropy.f.in_interior(*entropy.default_anchor));
}
