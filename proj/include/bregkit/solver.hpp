#pragma once

#include <functional>
#include <limits>
#include <string>

#include "bregkit/operators.hpp"

namespace bregkit {

enum class ResolventOrder { Composed, Cyclic };

// alpha_n = a / (n + b). With a in (0, 1] and b >= 1 the sequence lives in
// (0, 1), vanishes, and has divergent sum, which is what the anchor stage
// needs.
struct AlphaSchedule {
  double a = 1.0;
  double b = 1.0;
  double at(long n) const { return a / (static_cast<double>(n) + b); }
};

struct SolverConfig {
  AlphaSchedule alpha;
  double beta = 0.5;                 // averaging weight for the operator stage
  long max_iters = 100000;
  double stop_residual = 1e-8;       // run halts once every residual drops below
  double resolvent_tol = 1e-10;
  ResolventOrder resolvent_order = ResolventOrder::Composed;
  std::optional<Vec> anchor;         // defaults to the origin (or the instance override)
  bool strict_zero_anchor = false;   // refuse geometries whose domain misses the origin
  int ep_probe_count = 128;          // probe-cloud size behind ep_residual_max
  std::uint64_t rng_seed = 42;       // seeds the probe clouds; same seed, same trace
};

struct ProblemInstance {
  std::string name;
  LegendreFunction f;
  ConvexSet constraint;
  std::vector<Bifunction> bifunctions;
  std::vector<QbneOperator> operators;
  std::optional<Vec> reference_solution;   // a known common solution, when available
  std::optional<ConvexSet> solution_set;   // the full solution set, when representable
  std::optional<Vec> default_anchor;       // instance-level anchor override

  int dim() const { return f.dim(); }
};

// Checks that a declared reference solution really is one: feasible, an
// equilibrium point of every bifunction, fixed by every operator.
void validate_reference(const ProblemInstance& prob);

inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

struct IterationRecord {
  long n = 0;
  Vec x;                                   // iterate at the start of step n
  double dist_to_ref = kUnknown;           // D_f(reference, x_n)
  double dist_to_proj_anchor0 = kUnknown;  // |x_n - P_Omega(anchor)|
  double dist_to_proj_x1 = kUnknown;       // |x_n - P_Omega(x_1)|
  double ep_residual_max = kUnknown;       // worst equilibrium residual at x_n
  double fixpoint_residual = kUnknown;     // |x_n - T_[n] x_n|
  double step_norm = kUnknown;             // |x_{n+1} - x_n|
};

// Intermediate stages of one iteration, for invariant checks and debugging.
struct StageTrace {
  long n;
  const Vec& x;   // iterate entering the step
  const Vec& u;   // resolvent stage output
  const Vec& z;   // anchor-mix point before the feasibility projection
  const Vec& y;   // projected anchor-stage point
  const Vec& ty;  // operator applied to y
};
using StageObserver = std::function<void(const StageTrace&)>;

struct RunResult {
  std::vector<IterationRecord> records;
  Vec final_x;
  long iterations = 0;
  std::string stop_reason;  // "residual" or "max_iters"
  std::optional<Vec> proj_from_anchor;  // P_Omega(anchor), when Omega is representable
  std::optional<Vec> proj_from_start;   // P_Omega(x_1)
};

// Anchored scheme: resolvent stage, anchor-damped dual mix projected onto the
// constraint, then a convex dual mix with the cyclically selected operator.
RunResult run_main(const ProblemInstance& prob, const SolverConfig& cfg, const Vec& x1,
                   const StageObserver& observe = {});

// Baseline scheme (single bifunction): resolvent, operator mix with x_n in
// the dual, then an x_n-anchored dual mix; no feasibility projections.
RunResult run_kumam(const ProblemInstance& prob, const SolverConfig& cfg, const Vec& x1,
                    const StageObserver& observe = {});

// Bregman projection of `anchor` onto the instance's representable solution
// set; ArgumentError when the instance does not carry one.
Vec project_onto_solution_set(const ProblemInstance& prob, const Vec& anchor);

}  // namespace bregkit
