#include "bregkit/solver.hpp"

#include <algorithm>
#include <cmath>

#include "bregkit/geometry.hpp"

namespace bregkit {

namespace {

void validate_config(const ProblemInstance& prob, const SolverConfig& cfg) {
  if (prob.bifunctions.empty()) throw ArgumentError("solver: need at least one bifunction");
  if (prob.operators.empty()) throw ArgumentError("solver: need at least one operator");
  const int d = prob.dim();
  if (prob.constraint.dim() != d) throw ArgumentError("solver: constraint dimension mismatch");
  for (const auto& g : prob.bifunctions)
    if (g.dim() != d) throw ArgumentError("solver: bifunction dimension mismatch");
  for (const auto& t : prob.operators)
    if (t.dim() != d) throw ArgumentError("solver: operator dimension mismatch");
  if (!(cfg.alpha.a > 0.0) || cfg.alpha.a > 1.0)
    throw ArgumentError("solver: alpha numerator must lie in (0, 1]");
  if (!(cfg.alpha.b >= 1.0)) throw ArgumentError("solver: alpha offset must be >= 1");
  if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0))
    throw ArgumentError("solver: beta must lie strictly inside (0, 1)");
  if (cfg.max_iters < 1) throw ArgumentError("solver: max_iters must be >= 1");
  if (!(cfg.stop_residual >= 0.0)) throw ArgumentError("solver: stop_residual must be >= 0");
  if (!(cfg.resolvent_tol > 0.0)) throw ArgumentError("solver: resolvent_tol must be positive");
  if (cfg.ep_probe_count < 1) throw ArgumentError("solver: ep_probe_count must be >= 1");
}

Vec resolve_anchor(const ProblemInstance& prob, const SolverConfig& cfg) {
  Vec anchor = Vec::Zero(prob.dim());
  if (cfg.strict_zero_anchor) {
    // Strict mode pins the anchor to the origin, ignoring the instance
    // override; geometries whose domain misses the origin get refused below.
    if (cfg.anchor && cfg.anchor->norm() != 0.0)
      throw ArgumentError("solver: strict mode conflicts with an explicit nonzero anchor");
  } else if (cfg.anchor) {
    anchor = *cfg.anchor;
  } else if (prob.default_anchor) {
    anchor = *prob.default_anchor;
  }
  check_dim(anchor, prob.dim(), "solver anchor");
  if (!prob.f.in_interior(anchor))
    throw DomainError("solver: anchor lies outside int dom f; supply an interior anchor");
  return anchor;
}

// Per-run recording state: the solution-set candidates and one probe cloud
// per bifunction, seeded from the config so identical configs replay exactly.
struct Recorder {
  const ProblemInstance& prob;
  std::optional<Vec> from_anchor;
  std::optional<Vec> from_start;
  std::vector<std::vector<Vec>> clouds;

  Recorder(const ProblemInstance& p, const SolverConfig& cfg, const Vec& anchor, const Vec& x1)
      : prob(p) {
    if (prob.solution_set) {
      from_anchor = project_onto_solution_set(prob, anchor);
      from_start = project_onto_solution_set(prob, x1);
    }
    const int half = cfg.ep_probe_count / 2;
    for (std::size_t j = 0; j < prob.bifunctions.size(); ++j) {
      const std::uint64_t seed =
          cfg.rng_seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(j + 1);
      clouds.push_back(prob.bifunctions[j].feasible_set().probe_points(
          half, cfg.ep_probe_count - half, seed));
    }
  }

  // Residual against the probe cloud, without the membership gate of
  // ep_residual: baseline iterates may drift off the feasible set.
  IterationRecord record(long n, const Vec& x, const Vec& tx, const Vec& xnext) const {
    IterationRecord rec;
    rec.n = n;
    rec.x = x;
    if (prob.reference_solution)
      rec.dist_to_ref = bregman_distance(prob.f, *prob.reference_solution, x);
    if (from_anchor) rec.dist_to_proj_anchor0 = (x - *from_anchor).norm();
    if (from_start) rec.dist_to_proj_x1 = (x - *from_start).norm();
    double ep = 0.0;
    for (std::size_t j = 0; j < clouds.size(); ++j)
      for (const auto& y : clouds[j]) ep = std::max(ep, -prob.bifunctions[j].eval(x, y));
    rec.ep_residual_max = std::max(ep, 0.0);
    rec.fixpoint_residual = (x - tx).norm();
    rec.step_norm = (xnext - x).norm();
    return rec;
  }
};

bool should_stop(const IterationRecord& rec, double stop_residual) {
  return std::max({rec.ep_residual_max, rec.fixpoint_residual, rec.step_norm}) <= stop_residual;
}

}  // namespace

void validate_reference(const ProblemInstance& prob) {
  if (!prob.reference_solution) return;
  const Vec& p = *prob.reference_solution;
  if (!prob.constraint.contains(p, 1e-7))
    throw ArgumentError("validate_reference: point is not feasible");
  for (const auto& g : prob.bifunctions)
    if (ep_residual(g, p) > 1e-7)
      throw ArgumentError("validate_reference: point fails an equilibrium residual");
  for (const auto& t : prob.operators)
    if ((t.apply(p) - p).norm() > 1e-7)
      throw ArgumentError("validate_reference: point is not fixed by every operator");
  if (prob.solution_set && !prob.solution_set->contains(p, 1e-7))
    throw ArgumentError("validate_reference: point misses the declared solution set");
}

Vec project_onto_solution_set(const ProblemInstance& prob, const Vec& anchor) {
  if (!prob.solution_set)
    throw ArgumentError("project_onto_solution_set: instance has no representable solution set");
  return bregman_project(prob.f, *prob.solution_set, anchor);
}

RunResult run_main(const ProblemInstance& prob, const SolverConfig& cfg, const Vec& x1,
                   const StageObserver& observe) {
  validate_config(prob, cfg);
  check_dim(x1, prob.dim(), "run_main");
  check_finite(x1, "run_main");
  if (!prob.constraint.contains(x1)) throw ArgumentError("run_main: x1 must be feasible");
  if (!prob.f.in_interior(x1)) throw DomainError("run_main: x1 must sit in int dom f");

  const LegendreFunction& f = prob.f;
  const Vec anchor = resolve_anchor(prob, cfg);
  const Vec grad_anchor = f.gradient(anchor);
  const Recorder rec(prob, cfg, anchor, x1);

  ResolveOptions ropts;
  ropts.tol = cfg.resolvent_tol;

  RunResult out;
  out.proj_from_anchor = rec.from_anchor;
  out.proj_from_start = rec.from_start;
  out.stop_reason = "max_iters";

  Vec x = x1;
  const long m = static_cast<long>(prob.bifunctions.size());
  for (long n = 1; n <= cfg.max_iters; ++n) {
    Vec u = x;
    if (cfg.resolvent_order == ResolventOrder::Composed) {
      for (const auto& g : prob.bifunctions) u = resolve(f, g, u, ropts);
    } else {
      u = resolve(f, prob.bifunctions[static_cast<std::size_t>((n - 1) % m)], x, ropts);
    }

    const double alpha = cfg.alpha.at(n);
    const Vec z = f.conj_gradient(alpha * grad_anchor + (1.0 - alpha) * f.gradient(u));
    const Vec y = bregman_project(f, prob.constraint, z);

    const QbneOperator& op = cyclic_select(prob.operators, n);
    const Vec ty = op.apply(y);
    const Vec xnext = bregman_project(
        f, prob.constraint,
        f.conj_gradient(cfg.beta * f.gradient(y) + (1.0 - cfg.beta) * f.gradient(ty)));

    if (observe) observe(StageTrace{n, x, u, z, y, ty});
    out.records.push_back(rec.record(n, x, op.apply(x), xnext));
    x = xnext;
    if (should_stop(out.records.back(), cfg.stop_residual)) {
      out.stop_reason = "residual";
      break;
    }
  }
  out.final_x = x;
  out.iterations = static_cast<long>(out.records.size());
  return out;
}

RunResult run_kumam(const ProblemInstance& prob, const SolverConfig& cfg, const Vec& x1,
                    const StageObserver& observe) {
  validate_config(prob, cfg);
  if (prob.bifunctions.size() != 1)
    throw ArgumentError("run_kumam: baseline scheme takes exactly one bifunction");
  check_dim(x1, prob.dim(), "run_kumam");
  check_finite(x1, "run_kumam");
  if (!prob.constraint.contains(x1)) throw ArgumentError("run_kumam: x1 must be feasible");
  if (!prob.f.in_interior(x1)) throw DomainError("run_kumam: x1 must sit in int dom f");

  const LegendreFunction& f = prob.f;
  const Bifunction& g = prob.bifunctions.front();
  // No anchor in this scheme; resolve one anyway so the candidate-distance
  // columns line up with run_main on the same instance.
  const Recorder rec(prob, cfg, resolve_anchor(prob, cfg), x1);

  ResolveOptions ropts;
  ropts.tol = cfg.resolvent_tol;

  RunResult out;
  out.proj_from_anchor = rec.from_anchor;
  out.proj_from_start = rec.from_start;
  out.stop_reason = "max_iters";

  Vec x = x1;
  for (long n = 1; n <= cfg.max_iters; ++n) {
    const QbneOperator& op = cyclic_select(prob.operators, n);
    const Vec z = resolve(f, g, x, ropts);
    const Vec tz = op.apply(z);
    const Vec y = f.conj_gradient(cfg.beta * f.gradient(x) + (1.0 - cfg.beta) * f.gradient(tz));
    const Vec ty = op.apply(y);
    const double alpha = cfg.alpha.at(n);
    const Vec xnext = f.conj_gradient(alpha * f.gradient(x) + (1.0 - alpha) * f.gradient(ty));

    if (observe) observe(StageTrace{n, x, z, y, y, ty});
    out.records.push_back(rec.record(n, x, op.apply(x), xnext));
    x = xnext;
    if (should_stop(out.records.back(), cfg.stop_residual)) {
      out.stop_reason = "residual";
      break;
    }
  }
  out.final_x = x;
  out.iterations = static_cast<long>(out.records.size());
  return out;
}

}  // namespace bregkit
