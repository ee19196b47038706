#pragma once

#include <cstdint>
#include <string>

#include "bregkit/solver.hpp"

namespace bregkit {

enum class SolverChoice { Main, Kumam };
enum class TraceFormat { Csv, Json };

// A fully resolved experiment: instance, solver choice, config, start point.
// Built from a JSON document with a strict schema (unknown keys rejected,
// seed mandatory); `canonical_text` keeps the normalized document so a spec
// can be serialized and re-ingested into an identical run.
struct ExperimentSpec {
  std::string name;
  std::uint64_t seed = 0;
  ProblemInstance instance;
  SolverChoice solver = SolverChoice::Main;
  SolverConfig config;
  Vec x1;
  TraceFormat format = TraceFormat::Csv;
  std::string run_dir_name;  // subdirectory under the output root
  std::string canonical_text;

  static ExperimentSpec from_json_text(const std::string& text);
  static ExperimentSpec from_json_file(const std::string& path);
  const std::string& to_json_text() const { return canonical_text; }
};

struct ExperimentOutcome {
  std::string run_dir;  // directory holding trace + summary
  RunResult result;
};

// Executes the spec, then writes <out_dir>/<run_dir_name>/trace.{csv,json}
// and summary.json. The run happens fully in memory first, so a spec that
// fails validation leaves no artifacts behind.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

}  // namespace bregkit
