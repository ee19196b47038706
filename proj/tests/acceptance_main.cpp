// Acceptance gate: one line per criterion, nonzero exit when any fail.
// Tolerances are pinned here and must not be loosened to force a pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bregkit/experiment.hpp"
#include "bregkit/geometry.hpp"
#include "bregkit/instances.hpp"
#include "bregkit/solver.hpp"
#include "bregkit/verify.hpp"

using bregkit::LegendreFunction;
using bregkit::Rng;
using bregkit::SolverConfig;
using bregkit::SweepResult;
using bregkit::Vec;

namespace {

int g_failures = 0;

struct Line {
  bool ok = false;
  std::string detail;
};

void report(int index, const char* label, const Line& line) {
  std::printf("[%s] %02d %-16s %s\n", line.ok ? "PASS" : "FAIL", index, label,
              line.detail.c_str());
  if (!line.ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// Interior sample for any generator kind.
Vec sample_point(const LegendreFunction& f, Rng& rng) {
  Vec x = rng.gaussian(f.dim());
  if (f.kind() == bregkit::LegendreKind::NegativeEntropy)
    x = x.cwiseAbs() + Vec::Constant(f.dim(), 0.05);
  return x;
}

std::vector<LegendreFunction> kinds_for_dim(int d, Rng& rng) {
  Vec diag = rng.uniform_vec(d, 0.5, 2.5);
  bregkit::Mat q = diag.asDiagonal();
  for (int i = 0; i + 1 < d; ++i) {  // couple neighbors, keep diagonal dominance
    const double c = 0.2 * rng.uniform01();
    q(i, i + 1) += c;
    q(i + 1, i) += c;
  }
  return {LegendreFunction::squared_norm(d), LegendreFunction::quadratic_form(q),
          LegendreFunction::p_norm(d, 3.0), LegendreFunction::negative_entropy(d)};
}

// 1. Three-point and chain identities, relative residual <= 1e-10, under 5 s.
Line check_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(42);
  double worst = 0.0;
  long samples = 0;
  for (int d : {1, 2, 5, 8}) {
    for (const auto& f : kinds_for_dim(d, rng)) {
      for (int trial = 0; trial < 1000; ++trial) {
        const Vec z = sample_point(f, rng);
        const Vec y = sample_point(f, rng);
        const Vec x = sample_point(f, rng);
        const double cross = (f.gradient(y) - f.gradient(x)).dot(z - y);
        const double scale = 1.0 + std::abs(bregkit::bregman_distance(f, z, x)) +
                             std::abs(bregkit::bregman_distance(f, z, y)) +
                             std::abs(bregkit::bregman_distance(f, y, x)) + std::abs(cross);
        worst = std::max(worst, std::abs(bregkit::three_point_gap(f, z, y, x)) / scale);

        std::vector<Vec> chain = {z, y, x, sample_point(f, rng)};
        double cscale = 1.0 + std::abs(bregkit::bregman_distance(f, chain.front(), chain.back()));
        for (std::size_t k = 1; k < chain.size(); ++k)
          cscale += std::abs(bregkit::bregman_distance(f, chain[k - 1], chain[k]));
        worst = std::max(worst, std::abs(bregkit::chain_gap(f, chain)) / cscale);
        samples += 2;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-10 && elapsed < 5.0,
          fmt("worst rel %.2e (<= 1e-10), %.2f s (< 5 s), ", worst, elapsed) +
              std::to_string(samples) + " checks"};
}

// 2. Gradient round trip and Young-Fenchel equality at gradient pairs, 1e-9.
Line check_conjugacy() {
  Rng rng(43);
  double worst_rt = 0.0, worst_yf = 0.0;
  for (int d : {1, 2, 5, 8}) {
    for (const auto& f : kinds_for_dim(d, rng)) {
      for (int trial = 0; trial < 250; ++trial) {
        const Vec x = sample_point(f, rng);
        const Vec u = f.gradient(x);
        worst_rt = std::max(worst_rt, (f.conj_gradient(u) - x).norm() / (1.0 + x.norm()));
        const double pairing = u.dot(x);
        worst_yf = std::max(worst_yf, std::abs(f.value(x) + f.conj_value(u) - pairing) /
                                          (1.0 + std::abs(pairing)));
      }
    }
  }
  return {worst_rt <= 1e-9 && worst_yf <= 1e-9,
          fmt("round trip %.2e, Young-Fenchel %.2e (<= 1e-9), 1000 per kind", worst_rt,
              worst_yf)};
}

const SweepResult* find_sweep(const bregkit::VerifyReport& rep, const std::string& name) {
  for (const auto& s : rep.sweeps)
    if (s.name == name) return &s;
  return nullptr;
}

bool sweep_ok(const bregkit::VerifyReport& rep, const std::string& name, double bound,
              long min_samples, std::string& detail) {
  const SweepResult* s = find_sweep(rep, name);
  if (!s) {
    detail += name + ": missing; ";
    return false;
  }
  const bool bound_ok = std::abs(s->bound - bound) <= 1e-15 * (1.0 + std::abs(bound));
  if (!s->pass || !bound_ok || s->samples < min_samples) {
    detail += name + (s->pass ? ": bound or sample floor drifted; " : ": failed; ");
    return false;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%s %.2e vs %.0e; ", name.c_str(), s->worst, s->bound);
  detail += buf;
  return true;
}

// 3. Projection optimality sweeps, with the pinned bounds and sample floors.
Line check_projections(const bregkit::VerifyReport& rep) {
  std::string detail;
  bool ok = true;
  ok &= sweep_ok(rep, "projection-variational-inequality", 1e-7, 500, detail);
  ok &= sweep_ok(rep, "projection-pythagoras", -1e-8, 500, detail);
  ok &= sweep_ok(rep, "projection-euclidean-oracle", 1e-9, 100, detail);
  ok &= sweep_ok(rep, "projection-grid-oracle-2d", 2e-3, 1, detail);
  return {ok, detail};
}

// 4. Resolvent properties and the closed-form linear oracle.
Line check_resolvents(const bregkit::VerifyReport& rep) {
  std::string detail;
  bool ok = true;
  ok &= sweep_ok(rep, "resolvent-single-valued", 1e-5, 1, detail);
  ok &= sweep_ok(rep, "resolvent-firmly-nonexpansive", -1e-7, 500, detail);
  ok &= sweep_ok(rep, "resolvent-solution-inequality", -1e-7, 500, detail);
  ok &= sweep_ok(rep, "resolvent-linear-oracle", 1e-8, 1, detail);
  return {ok, detail};
}

// 5. Jensen-type dual-average bound, 500 draws per kind.
Line check_jensen(const bregkit::VerifyReport& rep) {
  std::string detail;
  const bool ok = sweep_ok(rep, "jensen-dual-average", -1e-9, 2000, detail);
  return {ok, detail};
}

struct RunCheck {
  Line line;
  bregkit::RunResult out;
};

// 6. Showcase desk run: contraction to the known solution with monotone tail.
RunCheck check_showcase() {
  const auto t0 = std::chrono::steady_clock::now();
  auto prob = bregkit::generate_instance("euclidean-showcase");
  SolverConfig cfg;
  cfg.max_iters = 10000;
  cfg.stop_residual = 0.0;
  Vec x1(2);
  x1 << 4.0, 4.0;
  auto out = bregkit::run_main(prob, cfg, x1);
  const double elapsed = seconds_since(t0);

  const double final_norm = out.final_x.norm();
  // dist_to_ref carries D_f(0, x_n); find where the sequence stops rising.
  long last_rise = 0;
  for (std::size_t i = 0; i + 1 < out.records.size(); ++i) {
    const double dn = out.records[i].dist_to_ref;
    const double dn1 = out.records[i + 1].dist_to_ref;
    if (dn1 > dn + 1e-12 * (1.0 + dn)) last_rise = out.records[i + 1].n;
  }
  const double fixres = out.records.back().fixpoint_residual;
  // The exact projection routes can drive the iterate to exactly zero, at
  // which point the residual stop rule fires early; that is convergence, not
  // a truncated run, so accept it alongside the full iteration budget.
  const bool ran = out.iterations == 10000 || out.stop_reason == "residual";
  const bool ok = ran && final_norm <= 1e-3 && last_rise <= 9000 && fixres <= 1e-3 &&
                  elapsed < 30.0;
  Line line{ok, fmt("|x| %.2e (<= 1e-3), fixpoint %.2e, %.1f s (< 30 s)", final_norm, fixres,
                    elapsed) +
                    ", monotone after n=" + std::to_string(last_rise)};
  return {line, std::move(out)};
}

// 8. Long segment run: converge to the solution set and record both candidate
// limit points; which one wins is logged, not asserted.
RunCheck check_segment(const bregkit::ProblemInstance& prob) {
  SolverConfig cfg;
  cfg.max_iters = 100000;
  cfg.stop_residual = 0.0;
  Vec x1(2);
  x1 << 4.0, 3.0;
  auto out = bregkit::run_main(prob, cfg, x1);
  const Vec x = out.final_x;
  const double dist_set = (x - prob.solution_set->euclidean_project(x)).norm();
  const auto& last = out.records.back();
  const bool recorded =
      std::isfinite(last.dist_to_proj_anchor0) && std::isfinite(last.dist_to_proj_x1);
  const bool ok = out.iterations == 100000 && dist_set <= 1e-3 && recorded;
  Line line{ok, fmt("dist to set %.2e (<= 1e-3), to P(anchor) %.2e, to P(x1) %.2e", dist_set,
                    last.dist_to_proj_anchor0, last.dist_to_proj_x1)};
  return {line, std::move(out)};
}

// 9. Baseline scheme: residual stop on the showcase, and per-step agreement
// with the explicit matrix recursion on the linear instance.
RunCheck check_baseline(const bregkit::ProblemInstance& linear_prob, SolverConfig& linear_cfg) {
  auto showcase = bregkit::generate_instance("euclidean-showcase");
  SolverConfig cfg;
  cfg.max_iters = 100000;
  cfg.stop_residual = 1e-3;
  Vec x1(2);
  x1 << 4.0, 4.0;
  auto settled = bregkit::run_kumam(showcase, cfg, x1);
  const bool settled_ok = settled.stop_reason == "residual" && settled.iterations <= 100000;

  linear_cfg.max_iters = 2000;
  linear_cfg.stop_residual = 0.0;
  linear_cfg.resolvent_tol = 1e-12;
  double worst = 0.0;
  Vec prev_x(2);
  long prev_n = 0;
  bool have_prev = false;
  auto observer = [&](const bregkit::StageTrace& st) {
    if (have_prev) {
      const double alpha = linear_cfg.alpha.at(prev_n);
      const double beta = linear_cfg.beta;
      // z = x/2, y = (b x0, b x1 + (1-b) x1/2), x+ = (a x0, a x1 + (1-a) y1).
      const double y1 = beta * prev_x[1] + (1.0 - beta) * prev_x[1] / 2.0;
      const double e0 = alpha * prev_x[0];
      const double e1 = alpha * prev_x[1] + (1.0 - alpha) * y1;
      worst = std::max(worst, std::max(std::abs(st.x[0] - e0), std::abs(st.x[1] - e1)));
    }
    prev_x = st.x;
    prev_n = st.n;
    have_prev = true;
  };
  Vec lx1(2);
  lx1 << 4.0, 3.0;
  auto traced = bregkit::run_kumam(linear_prob, linear_cfg, lx1, observer);
  const bool ok = settled_ok && worst <= 1e-10;
  Line line{ok, fmt("residual stop after %.0f iters, per-step oracle gap %.2e (<= 1e-10)",
                    static_cast<double>(settled.iterations), worst)};
  return {line, std::move(traced)};
}

// 7. Boundedness recursion D(p, x_{n+1}) <= max(D(p, anchor), D(p, x_n)) + 1e-7
// over every solver run this binary executes.
struct NamedRun {
  std::string name;
  const bregkit::ProblemInstance* prob;
  Vec anchor;
  const bregkit::RunResult* out;
};

Line check_boundedness(const std::vector<NamedRun>& runs) {
  bool ok = true;
  double worst = -1e300;
  std::string where = "n/a";
  long total = 0;
  for (const auto& r : runs) {
    Vec p;
    if (r.prob->reference_solution)
      p = *r.prob->reference_solution;
    else if (r.out->proj_from_anchor)
      p = *r.out->proj_from_anchor;
    else
      continue;
    const double d_anchor = bregkit::bregman_distance(r.prob->f, p, r.anchor);
    for (std::size_t i = 0; i + 1 < r.out->records.size(); ++i) {
      const double dn = bregkit::bregman_distance(r.prob->f, p, r.out->records[i].x);
      const double dn1 = bregkit::bregman_distance(r.prob->f, p, r.out->records[i + 1].x);
      const double slack = dn1 - std::max(d_anchor, dn);
      if (slack > worst) {
        worst = slack;
        where = r.name;
      }
      if (slack > 1e-7) ok = false;
      ++total;
    }
  }
  return {ok, fmt("worst slack %.2e (<= 1e-7) over ", worst) + std::to_string(total) +
                  " steps, extreme at " + where};
}

// 10. Identical spec and seed reproduce trace files byte for byte, including
// through a serialize-reingest round trip.
Line check_reproducibility() {
  namespace fs = std::filesystem;
  const char* text = R"({
    "name": "repro-probe",
    "seed": 2026,
    "instance": "euclidean-showcase",
    "config": {"max_iters": 3000, "stop_residual": 0.0},
    "x1": [4, 3]
  })";
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const fs::path root = fs::temp_directory_path() / "bregkit-acceptance";
  fs::remove_all(root);
  auto spec = bregkit::ExperimentSpec::from_json_text(text);
  auto a = bregkit::run_experiment(spec, (root / "a").string());
  auto b = bregkit::run_experiment(spec, (root / "b").string());
  const std::string trace_a = slurp(fs::path(a.run_dir) / "trace.csv");
  const bool twice = !trace_a.empty() && trace_a == slurp(fs::path(b.run_dir) / "trace.csv") &&
                     slurp(fs::path(a.run_dir) / "summary.json") ==
                         slurp(fs::path(b.run_dir) / "summary.json");

  auto spec2 =
      bregkit::ExperimentSpec::from_json_file((fs::path(a.run_dir) / "spec.json").string());
  auto c = bregkit::run_experiment(spec2, (root / "c").string());
  const bool reingest = trace_a == slurp(fs::path(c.run_dir) / "trace.csv");

  return {twice && reingest, std::string("double run ") +
                                 (twice ? "identical" : "differs") + ", reingested spec " +
                                 (reingest ? "identical" : "differs")};
}

}  // namespace

int main() {
  std::printf("acceptance checks, seed 42\n");

  const Line identities = check_identities();
  const Line conjugacy = check_conjugacy();

  const auto report_42 = bregkit::verify_suite(42);
  const Line projections = check_projections(report_42);
  const Line resolvents = check_resolvents(report_42);
  const Line jensen = check_jensen(report_42);

  const auto showcase_prob = bregkit::generate_instance("euclidean-showcase");
  const auto segment_prob = bregkit::generate_instance("omega-segment");
  const auto linear_prob = bregkit::generate_instance("kumam-linear");

  RunCheck showcase = check_showcase();
  RunCheck segment = check_segment(segment_prob);
  SolverConfig linear_cfg;
  RunCheck baseline = check_baseline(linear_prob, linear_cfg);

  const Line bounded = check_boundedness({
      {"euclidean-showcase", &showcase_prob, Vec::Zero(2), &showcase.out},
      {"omega-segment", &segment_prob, Vec::Zero(2), &segment.out},
      {"kumam-linear", &linear_prob, Vec::Zero(2), &baseline.out},
  });

  const Line repro = check_reproducibility();

  report(1, "identities", identities);
  report(2, "conjugacy", conjugacy);
  report(3, "projections", projections);
  report(4, "resolvents", resolvents);
  report(5, "jensen bound", jensen);
  report(6, "showcase run", showcase.line);
  report(7, "boundedness", bounded);
  report(8, "segment limit", segment.line);
  report(9, "baseline parity", baseline.line);
  report(10, "reproducibility", repro);

  if (g_failures == 0) {
    std::printf("all criteria satisfied\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
