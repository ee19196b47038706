#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bregkit/solver.hpp"

namespace bregkit {

struct InstanceInfo {
  std::string name;
  int default_dim = 0;
  bool fixed_dim = true;  // false: any d >= 1 is accepted
  std::string summary;
};

// Catalog of the built-in problem instances, in list-instances order.
const std::vector<InstanceInfo>& builtin_instances();

// Builds a named instance. d = 0 picks the instance default; fixed-geometry
// instances reject any other value. The builtins are fully deterministic, so
// the seed only participates in downstream probe clouds; generation is a pure
// function of (name, d, seed). Throws ArgumentError for unknown names.
ProblemInstance generate_instance(const std::string& name, int d = 0,
                                  std::uint64_t seed = 42);

}  // namespace bregkit
