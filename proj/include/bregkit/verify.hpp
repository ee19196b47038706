#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bregkit/projection.hpp"

namespace bregkit {

// One property sweep: `worst` is the extreme value observed (largest gap for
// identities, smallest slack for inequalities) and `bound` is what it was
// held against; the comparison direction is part of the sweep itself.
struct SweepResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double bound = 0.0;
  long samples = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<SweepResult> sweeps;
  bool all_pass() const;
  std::string to_json() const;
  std::string to_text() const;
};

// Runs every module's invariant sweeps with the given seed: identities,
// conjugacy, Jensen bound, projection optimality, resolvent properties,
// operator gaps, bifunction axioms (including a deliberately corrupted
// negative control), and short solver runs. Failures become report entries,
// never exceptions.
VerifyReport verify_suite(std::uint64_t seed);

// Coarse-to-fine grid minimizer of z -> D_f(z, x) over a 2-d set; reference
// oracle for the projection tests. The final grid step is <= target_step, so
// the returned point matches the true minimizer to about that resolution.
Vec grid_min_bregman_2d(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                        double target_step = 1e-3);

}  // namespace bregkit
