#include "bregkit/verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>

#include "bregkit/equilibrium.hpp"
#include "bregkit/geometry.hpp"
#include "bregkit/instances.hpp"
#include "bregkit/operators.hpp"
#include "bregkit/rng.hpp"
#include "json.hpp"

namespace bregkit {

namespace {

// A geometry paired with a sampler that stays inside int dom f and keeps
// magnitudes moderate, so absolute tolerances stay meaningful.
struct Geom {
  std::string label;
  LegendreFunction f;
  std::function<Vec(Rng&)> sample;
};

Mat random_spd(int d, Rng& rng) {
  Mat a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = rng.normal();
  return a.transpose() * a / static_cast<double>(d) + 0.5 * Mat::Identity(d, d);
}

std::vector<Geom> geometries(int d, Rng& rng) {
  std::vector<Geom> out;
  out.push_back({"squared-norm", LegendreFunction::squared_norm(d),
                 [d](Rng& r) { return Vec(1.2 * r.gaussian(d)); }});
  out.push_back({"quadratic-form", LegendreFunction::quadratic_form(random_spd(d, rng)),
                 [d](Rng& r) { return Vec(1.2 * r.gaussian(d)); }});
  out.push_back({"p-norm-3", LegendreFunction::p_norm(d, 3.0),
                 [d](Rng& r) { return Vec(1.2 * r.gaussian(d)); }});
  out.push_back({"p-norm-1.5", LegendreFunction::p_norm(d, 1.5),
                 [d](Rng& r) { return Vec(1.2 * r.gaussian(d)); }});
  out.push_back({"negative-entropy", LegendreFunction::negative_entropy(d),
                 [d](Rng& r) { return Vec(r.uniform_vec(d, 0.05, 2.5)); }});
  return out;
}

struct Sweeper {
  // deque: sweeps hold references to their entries while later entries are
  // appended, and deque keeps those references valid.
  std::deque<SweepResult> results;
  Rng rng;

  explicit Sweeper(std::uint64_t seed) : rng(seed) {}

  // worst is the largest magnitude seen; pass when worst <= bound.
  SweepResult& max_style(const std::string& name, double bound) {
    results.push_back({name, true, 0.0, bound, 0, ""});
    return results.back();
  }
  // worst is the smallest slack seen; pass when worst >= bound.
  SweepResult& min_style(const std::string& name, double bound) {
    results.push_back({name, true, std::numeric_limits<double>::infinity(), bound, 0, ""});
    return results.back();
  }
  static void observe_max(SweepResult& s, double value, const std::string& witness) {
    ++s.samples;
    if (value > s.worst) {
      s.worst = value;
      s.detail = witness;
    }
    s.pass = s.worst <= s.bound;
  }
  static void observe_min(SweepResult& s, double value, const std::string& witness) {
    ++s.samples;
    if (value < s.worst) {
      s.worst = value;
      s.detail = witness;
    }
    s.pass = s.worst >= s.bound;
  }
  void flag(const std::string& name, bool pass, double worst, double bound,
            const std::string& detail) {
    results.push_back({name, pass, worst, bound, 1, detail});
  }
};

std::string at(const std::string& label, int d) {
  return label + " d=" + std::to_string(d);
}

// ---- geometry identities ----------------------------------------------

void sweep_identities(Sweeper& sw) {
  auto& three = sw.max_style("three-point-identity", 1e-10);
  auto& chain = sw.max_style("chain-identity", 1e-10);
  for (int d : {1, 2, 5, 8}) {
    for (auto& g : geometries(d, sw.rng)) {
      for (int trial = 0; trial < 1000; ++trial) {
        Vec x = g.sample(sw.rng), y = g.sample(sw.rng), z = g.sample(sw.rng);
        const double dzx = bregman_distance(g.f, z, x);
        const double dzy = bregman_distance(g.f, z, y);
        const double dyx = bregman_distance(g.f, y, x);
        const double cross = (g.f.gradient(y) - g.f.gradient(x)).dot(z - y);
        const double scale = 1.0 + std::abs(dzx) + std::abs(dzy) + std::abs(dyx) +
                             std::abs(cross);
        Sweeper::observe_max(three, std::abs(three_point_gap(g.f, z, y, x)) / scale,
                             at(g.label, d));

        std::vector<Vec> links{x, y, z, g.sample(sw.rng)};
        double mass = 1.0 + std::abs(bregman_distance(g.f, links.front(), links.back()));
        for (std::size_t k = 1; k < links.size(); ++k)
          mass += std::abs(bregman_distance(g.f, links[k - 1], links[k]));
        Sweeper::observe_max(chain, std::abs(chain_gap(g.f, links)) / mass, at(g.label, d));
      }
    }
  }
}

void sweep_conjugacy(Sweeper& sw) {
  auto& round = sw.max_style("conjugacy-roundtrip", 1e-9);
  auto& young = sw.max_style("young-fenchel-at-gradient-pairs", 1e-9);
  auto& vfn = sw.max_style("v-function-identity", 1e-9);
  for (int d : {1, 2, 5, 8}) {
    for (auto& g : geometries(d, sw.rng)) {
      for (int trial = 0; trial < 1000; ++trial) {
        Vec x = g.sample(sw.rng);
        Vec xstar = g.f.gradient(x);
        Vec back = g.f.conj_gradient(xstar);
        Sweeper::observe_max(round, (back - x).norm() / (1.0 + x.norm()), at(g.label, d));

        const double gap =
            std::abs(g.f.value(x) + g.f.conj_value(xstar) - xstar.dot(x));
        Sweeper::observe_max(young, gap, at(g.label, d));

        if (trial < 300) {
          Vec other = g.sample(sw.rng);
          Vec u = g.f.gradient(other);
          const double lhs = v_fn(g.f, x, u);
          const double rhs = bregman_distance(g.f, x, g.f.conj_gradient(u));
          Sweeper::observe_max(vfn, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)),
                               at(g.label, d));
        }
      }
    }
  }
}

void sweep_gradient_fd(Sweeper& sw) {
  auto& fd = sw.max_style("gradient-finite-difference", 1e-5);
  for (int d : {2, 5}) {
    for (auto& g : geometries(d, sw.rng)) {
      for (int trial = 0; trial < 200; ++trial) {
        Vec x = g.sample(sw.rng);
        Vec e = sw.rng.unit_vector(d);
        const double h = 1e-6 * (1.0 + x.norm());
        if (!g.f.in_interior(x + h * e) || !g.f.in_interior(x - h * e)) continue;
        const double num = (g.f.value(x + h * e) - g.f.value(x - h * e)) / (2.0 * h);
        const double exact = g.f.gradient(x).dot(e);
        Sweeper::observe_max(fd, std::abs(num - exact) / (1.0 + std::abs(exact)),
                             at(g.label, d));
      }
    }
  }
}

void sweep_jensen(Sweeper& sw) {
  auto& jensen = sw.min_style("jensen-dual-average", -1e-9);
  for (int d : {2, 6}) {
    for (auto& g : geometries(d, sw.rng)) {
      for (int trial = 0; trial < 250; ++trial) {
        const int n = 2 + static_cast<int>(sw.rng.index(4));  // 2..5 points
        std::vector<Vec> pts;
        std::vector<double> w(static_cast<std::size_t>(n));
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
          pts.push_back(g.sample(sw.rng));
          w[static_cast<std::size_t>(i)] = 0.05 + sw.rng.uniform01();
          total += w[static_cast<std::size_t>(i)];
        }
        for (auto& wi : w) wi /= total;
        Vec z = g.sample(sw.rng);
        Vec avg = dual_average(g.f, w, pts);
        double rhs = 0.0;
        for (int i = 0; i < n; ++i)
          rhs += w[static_cast<std::size_t>(i)] * bregman_distance(g.f, z, pts[static_cast<std::size_t>(i)]);
        const double slack = rhs - bregman_distance(g.f, z, avg);
        Sweeper::observe_min(jensen, slack, at(g.label, d));
      }
    }
  }
}

void sweep_total_convexity(Sweeper& sw) {
  auto& conv = sw.min_style("total-convexity-positive", 1e-14);
  for (int d : {2, 4}) {
    for (auto& g : geometries(d, sw.rng)) {
      for (int trial = 0; trial < 50; ++trial) {
        Vec x = g.sample(sw.rng);
        for (double t : {0.25, 1.0}) {
          const double v = total_convexity_estimate(g.f, x, t, 24, sw.rng);
          Sweeper::observe_min(conv, v, at(g.label, d) + " t=" + std::to_string(t));
        }
      }
    }
  }
}

// ---- projections --------------------------------------------------------

struct ProjCase {
  std::string label;
  LegendreFunction f;
  std::function<ConvexSet(Rng&)> make_set;
  std::function<Vec(Rng&)> sample;  // projection argument, interior to dom f
};

ConvexSet random_box(int d, Rng& rng, double lo_base, double width) {
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = lo_base + 0.5 * rng.uniform01();
    hi[i] = lo[i] + 0.3 + width * rng.uniform01();
  }
  return ConvexSet::box(lo, hi);
}

std::vector<ProjCase> projection_cases(int d, Rng& rng) {
  std::vector<ProjCase> cases;
  auto gauss = [d](Rng& r) { return Vec(1.5 * r.gaussian(d)); };
  auto positive = [d](Rng& r) { return Vec(r.uniform_vec(d, 0.05, 2.2)); };

  auto halfspace = [d](Rng& r) {
    Vec a = r.unit_vector(d);
    return ConvexSet::halfspace(a, r.uniform(-1.0, 1.0));
  };
  auto hyperplane = [d](Rng& r) {
    Vec a = r.unit_vector(d);
    return ConvexSet::hyperplane(a, r.uniform(-1.0, 1.0));
  };
  auto box = [d](Rng& r) { return random_box(d, r, -1.0, 1.2); };
  auto ball = [d](Rng& r) {
    return ConvexSet::ball(Vec(0.4 * r.gaussian(d)), 0.5 + 1.2 * r.uniform01());
  };
  auto simplex = [d](Rng&) { return ConvexSet::simplex(d, 1.0); };
  auto chopped = [d](Rng& r) {
    Vec a = Vec::Constant(d, 1.0) / std::sqrt(static_cast<double>(d));
    std::vector<ConvexSet> members{ConvexSet::box(Vec::Constant(d, -1.5), Vec::Constant(d, 1.5)),
                                   ConvexSet::halfspace(a, r.uniform(0.2, 1.0))};
    return ConvexSet::intersection(std::move(members));
  };

  auto fsq = LegendreFunction::squared_norm(d);
  const std::vector<std::function<ConvexSet(Rng&)>> shapes{halfspace, hyperplane, box,
                                                           ball, simplex, chopped};
  for (const auto& mk : shapes) cases.push_back({"squared-norm", fsq, mk, gauss});

  auto fq = LegendreFunction::quadratic_form(random_spd(d, rng));
  cases.push_back({"quadratic-form", fq, halfspace, gauss});
  cases.push_back({"quadratic-form", fq, hyperplane, gauss});
  cases.push_back({"quadratic-form", fq, ball, gauss});
  cases.push_back({"quadratic-form", fq, simplex, gauss});

  auto fp = LegendreFunction::p_norm(d, 3.0);
  cases.push_back({"p-norm-3", fp, halfspace, gauss});
  cases.push_back({"p-norm-3", fp, hyperplane, gauss});
  cases.push_back({"p-norm-3", fp, box, gauss});
  cases.push_back({"p-norm-3", fp, ball, gauss});

  auto fe = LegendreFunction::negative_entropy(d);
  auto posbox = [d](Rng& r) { return random_box(d, r, 0.05, 1.0); };
  auto sumcap = [d](Rng& r) {
    return ConvexSet::halfspace(Vec::Constant(d, 1.0), r.uniform(0.5, 2.0));
  };
  auto sumplane = [d](Rng& r) {
    return ConvexSet::hyperplane(Vec::Constant(d, 1.0), r.uniform(0.5, 2.0));
  };
  cases.push_back({"negative-entropy", fe, posbox, positive});
  cases.push_back({"negative-entropy", fe, simplex, positive});
  cases.push_back({"negative-entropy", fe, sumcap, positive});
  cases.push_back({"negative-entropy", fe, sumplane, positive});
  return cases;
}

void sweep_projections(Sweeper& sw) {
  auto& vi = sw.max_style("projection-variational-inequality", 1e-7);
  auto& pyth = sw.min_style("projection-pythagoras", -1e-8);
  for (int d : {2, 5}) {
    for (auto& pc : projection_cases(d, sw.rng)) {
      for (int trial = 0; trial < 250; ++trial) {
        ConvexSet set = pc.make_set(sw.rng);
        Vec x = pc.sample(sw.rng);
        try {
          Vec z = bregman_project(pc.f, set, x);
          auto probes = set.probe_points(50, 50, sw.rng.raw());
          Sweeper::observe_max(vi, projection_vi_residual(pc.f, set, x, z, probes),
                               at(pc.label, d) + " onto " + set.describe());
          if (!probes.empty() && pc.f.in_closure(probes.front()))
            Sweeper::observe_min(pyth, pythagoras_gap(pc.f, set, x, probes.front()),
                                 at(pc.label, d) + " onto " + set.describe());
        } catch (const std::exception& e) {
          Sweeper::observe_max(vi, std::numeric_limits<double>::infinity(),
                               at(pc.label, d) + " onto " + set.describe() + ": " + e.what());
        }
      }
    }
  }
}

void sweep_euclidean_oracle(Sweeper& sw) {
  auto& agree = sw.max_style("projection-euclidean-oracle", 1e-9);
  const int d = 4;
  auto fsq = LegendreFunction::squared_norm(d);
  auto cases = projection_cases(d, sw.rng);
  for (auto& pc : cases) {
    if (pc.label != "squared-norm") continue;
    for (int trial = 0; trial < 500; ++trial) {
      ConvexSet set = pc.make_set(sw.rng);
      if (set.kind() == ConvexSet::Kind::Intersection) continue;  // no closed form
      Vec x = pc.sample(sw.rng);
      Vec z = bregman_project(fsq, set, x);
      Vec e = set.euclidean_project(x);
      Sweeper::observe_max(agree, (z - e).norm() / (1.0 + e.norm()), set.describe());
    }
  }
}

void sweep_grid_oracle(Sweeper& sw) {
  auto& agree = sw.max_style("projection-grid-oracle-2d", 2e-3);
  struct Case {
    LegendreFunction f;
    ConvexSet set;
    Vec x;
    std::string label;
  };
  Vec ball_c(2), box_lo(2), box_hi(2), ebox_lo(2), ebox_hi(2), x1(2), x2(2), x3(2), x4(2);
  ball_c << 0.3, -0.2;
  box_lo << -1.0, 0.2;
  box_hi << 0.5, 2.0;
  ebox_lo << 0.1, 0.2;
  ebox_hi << 1.0, 2.0;
  x1 << 2.1, 1.4;
  x2 << 1.6, -0.9;
  x3 << 2.0, 0.05;
  x4 << 1.4, 2.6;
  Vec hnormal(2);
  hnormal << 0.8, 0.6;
  std::vector<Case> cases;
  cases.push_back({LegendreFunction::squared_norm(2), ConvexSet::ball(ball_c, 1.2), x1,
                   "squared-norm onto ball"});
  cases.push_back({LegendreFunction::p_norm(2, 3.0), ConvexSet::box(box_lo, box_hi), x2,
                   "p-norm-3 onto box"});
  cases.push_back({LegendreFunction::negative_entropy(2), ConvexSet::box(ebox_lo, ebox_hi), x3,
                   "negative-entropy onto box"});
  cases.push_back({LegendreFunction::quadratic_form(random_spd(2, sw.rng)),
                   ConvexSet::halfspace(hnormal, -0.4), x4, "quadratic-form onto halfspace"});
  for (auto& c : cases) {
    Vec z = bregman_project(c.f, c.set, c.x);
    Vec grid = grid_min_bregman_2d(c.f, c.set, c.x, 1e-3);
    Sweeper::observe_max(agree, (z - grid).lpNorm<Eigen::Infinity>(), c.label);
  }
}

// ---- resolvents ----------------------------------------------------------

struct ResCase {
  std::string label;
  LegendreFunction f;
  Bifunction g;
  std::function<Vec(Rng&)> sample;
  std::optional<Vec> ep_point;  // a known equilibrium point
};

std::vector<ResCase> resolvent_cases(Rng& rng) {
  std::vector<ResCase> cases;
  const int d = 3;
  auto gauss = [d](Rng& r) { return Vec(1.5 * r.gaussian(d)); };
  auto positive = [d](Rng& r) {
    Vec v = r.uniform_vec(d, 0.1, 1.0);
    return Vec(v / v.sum());
  };
  auto box = ConvexSet::box(Vec::Constant(d, -1.5), Vec::Constant(d, 1.5));
  auto simplex = ConvexSet::simplex(d, 1.0);
  auto fsq = LegendreFunction::squared_norm(d);
  auto fq = LegendreFunction::quadratic_form(random_spd(d, rng));
  auto fe = LegendreFunction::negative_entropy(d);

  cases.push_back({"squared/linear-identity", fsq,
                   Bifunction::linear_monotone(Mat::Identity(d, d), Vec::Zero(d), box), gauss,
                   Vec(Vec::Zero(d))});
  Mat skewed(d, d);
  skewed << 1.0, 0.6, 0.0, -0.6, 1.0, 0.2, 0.0, -0.2, 0.8;
  cases.push_back({"squared/linear-skew", fsq,
                   Bifunction::linear_monotone(skewed, Vec::Zero(d), box), gauss,
                   Vec(Vec::Zero(d))});
  cases.push_back({"squared/l1", fsq,
                   Bifunction::proximal_convex(ConvexHandle::l1(0.3), box), gauss,
                   Vec(Vec::Zero(d))});
  cases.push_back({"squared/max-coordinate", fsq,
                   Bifunction::proximal_convex(ConvexHandle::max_coordinate(0.4), box), gauss,
                   Vec(Vec::Constant(d, -1.5))});
  cases.push_back({"quadratic/linear-identity", fq,
                   Bifunction::linear_monotone(Mat::Identity(d, d), Vec::Zero(d), box), gauss,
                   Vec(Vec::Zero(d))});
  Vec cost(d);
  cost << 0.0, 0.4, 0.9;
  cases.push_back({"entropy/linear-cost", fe,
                   Bifunction::proximal_convex(ConvexHandle::linear(cost), simplex), positive,
                   Vec(Vec::Unit(d, 0))});
  return cases;
}

void sweep_resolvents(Sweeper& sw) {
  auto& single = sw.max_style("resolvent-single-valued", 1e-5);
  auto& bfne = sw.min_style("resolvent-firmly-nonexpansive", -1e-7);
  auto& ineq = sw.min_style("resolvent-solution-inequality", -1e-7);
  for (auto& rc : resolvent_cases(sw.rng)) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = rc.sample(sw.rng);
      Vec z1 = resolve(rc.f, rc.g, x);
      ResolveOptions perturbed;
      perturbed.start = feasible_interior_start(rc.f, rc.g.feasible_set(), rc.sample(sw.rng));
      Vec z2 = resolve(rc.f, rc.g, x, perturbed);
      Sweeper::observe_max(single, (z1 - z2).norm(), rc.label);
    }
    for (int trial = 0; trial < 500; ++trial) {
      Vec x = rc.sample(sw.rng);
      Vec y = rc.sample(sw.rng);
      Sweeper::observe_min(bfne, firmly_nonexpansive_gap(rc.f, rc.g, x, y), rc.label);
      if (rc.ep_point)
        Sweeper::observe_min(ineq, resolvent_inequality_gap(rc.f, rc.g, x, *rc.ep_point),
                             rc.label);
    }
  }
}

void sweep_resolvent_linear_oracle(Sweeper& sw) {
  auto& oracle = sw.max_style("resolvent-linear-oracle", 1e-8);
  const int d = 3;
  auto box = ConvexSet::box(Vec::Constant(d, -2.0), Vec::Constant(d, 2.0));
  auto fsq = LegendreFunction::squared_norm(d);

  // A = 0: the resolvent is exactly the projection of x - c.
  for (int trial = 0; trial < 200; ++trial) {
    Vec c = 0.5 * sw.rng.gaussian(d);
    auto g = Bifunction::linear_monotone(Mat::Zero(d, d), c, box);
    Vec x = 2.0 * sw.rng.gaussian(d);
    Vec z = resolve(fsq, g, x);
    Vec want = box.euclidean_project(x - c);
    Sweeper::observe_max(oracle, (z - want).norm(), "zero-matrix shift");
  }

  // Diagonal A on a box: componentwise clamp((x_i - c_i) / (1 + a_i)).
  for (int trial = 0; trial < 200; ++trial) {
    Vec diag = sw.rng.uniform_vec(d, 0.0, 2.0);
    Vec c = 0.3 * sw.rng.gaussian(d);
    auto g = Bifunction::linear_monotone(Mat(diag.asDiagonal()), c, box);
    Vec x = 2.0 * sw.rng.gaussian(d);
    Vec z = resolve(fsq, g, x);
    Vec want(d);
    for (int i = 0; i < d; ++i)
      want[i] = std::clamp((x[i] - c[i]) / (1.0 + diag[i]), -2.0, 2.0);
    Sweeper::observe_max(oracle, (z - want).norm(), "diagonal matrix");
  }
}

// ---- operators and axioms -------------------------------------------------

void sweep_operators(Sweeper& sw) {
  auto& gap = sw.min_style("qbne-distance-gap", -1e-8);
  const int d = 2;
  auto fsq = LegendreFunction::squared_norm(d);
  auto fe = LegendreFunction::negative_entropy(d);
  Vec a1(2), a2(2);
  a1 << 1.0, 0.0;
  a2 << 0.0, 1.0;
  auto h1 = ConvexSet::halfspace(a1, 1.0);
  auto h2 = ConvexSet::halfspace(a2, 1.0);
  auto box = ConvexSet::box(Vec::Constant(d, -2.0), Vec::Constant(d, 2.0));
  auto simplex = ConvexSet::simplex(d, 1.0);

  std::vector<std::pair<QbneOperator, LegendreFunction>> ops;
  ops.emplace_back(QbneOperator::projection(fsq, h1), fsq);
  ops.emplace_back(QbneOperator::projection(fe, simplex), fe);
  ops.emplace_back(
      QbneOperator::composition({QbneOperator::projection(fsq, h1),
                                 QbneOperator::projection(fsq, h2)}),
      fsq);
  ops.emplace_back(QbneOperator::resolvent(
                       fsq, Bifunction::linear_monotone(Mat::Identity(d, d), Vec::Zero(d), box))
                       .with_fixed_point(Vec::Zero(d)),
                   fsq);

  for (auto& [op, f] : ops) {
    for (int trial = 0; trial < 300; ++trial) {
      Vec x = f.kind() == LegendreKind::NegativeEntropy
                  ? Vec(sw.rng.uniform_vec(d, 0.05, 1.5))
                  : Vec(1.5 * sw.rng.gaussian(d));
      Sweeper::observe_min(gap, qbne_gap(op, f, *op.known_fixed_point(), x), op.describe());
    }
  }
}

void sweep_axioms(Sweeper& sw) {
  const int d = 3;
  auto box = ConvexSet::box(Vec::Constant(d, -1.5), Vec::Constant(d, 1.5));
  auto good1 = Bifunction::linear_monotone(Mat::Identity(d, d), Vec::Zero(d), box);
  auto good2 = Bifunction::proximal_convex(ConvexHandle::l1(0.5), box);
  auto r1 = check_axioms(good1, 200, sw.rng.raw());
  auto r2 = check_axioms(good2, 200, sw.rng.raw());
  sw.flag("axioms-hold-on-valid-bifunctions", r1.all_pass && r2.all_pass,
          r1.all_pass && r2.all_pass ? 0.0 : 1.0, 0.0, "linear and l1 families");

  // Negative control: g(x, y) = <-x, y - x> is strictly *anti*monotone, so
  // the monotonicity axiom must be reported violated.
  auto bad = Bifunction::linear_monotone_unchecked(-Mat::Identity(d, d), Vec::Zero(d), box);
  auto rb = check_axioms(bad, 200, sw.rng.raw());
  bool caught = false;
  double worst = 0.0;
  for (const auto& chk : rb.checks)
    if (chk.axiom == "monotonicity") {
      caught = !chk.pass;
      worst = chk.worst;
    }
  sw.flag("axioms-catch-antimonotone-control", caught, worst, 0.0,
          "monotonicity violation detected");

  bool threw = false;
  try {
    Bifunction::linear_monotone(-Mat::Identity(d, d), Vec::Zero(d), box);
  } catch (const ArgumentError&) {
    threw = true;
  }
  sw.flag("antimonotone-matrix-rejected-at-construction", threw, threw ? 0.0 : 1.0, 0.0,
          "factory validation");
}

// ---- solver ---------------------------------------------------------------

void sweep_solver(Sweeper& sw) {
  // Degenerate instance: iterates follow x1 / n exactly.
  {
    auto& closed = sw.max_style("solver-degenerate-closed-form", 1e-12);
    auto prob = generate_instance("degenerate-identity", 2);
    SolverConfig cfg;
    cfg.max_iters = 100;
    cfg.stop_residual = 0.0;
    Vec x1 = Vec::Constant(2, 0.8);
    auto run = run_main(prob, cfg, x1);
    for (const auto& rec : run.records)
      Sweeper::observe_max(closed,
                           (rec.x - Vec(x1 / static_cast<double>(rec.n))).norm(),
                           "n=" + std::to_string(rec.n));
  }

  // Showcase: iterate feasibility plus the two per-iteration distance bounds.
  {
    auto& feas = sw.max_style("solver-iterate-feasibility", 1e-9);
    auto& bound = sw.min_style("solver-boundedness-recursion", -1e-7);
    auto& stage = sw.min_style("solver-anchor-stage-bound", -1e-7);
    auto prob = generate_instance("euclidean-showcase");
    const Vec p = *prob.reference_solution;
    const Vec anchor = Vec::Zero(2);
    SolverConfig cfg;
    cfg.max_iters = 600;
    cfg.stop_residual = 0.0;
    Vec x1 = Vec::Constant(2, 4.0);

    const double dp0 = bregman_distance(prob.f, p, anchor);
    std::vector<double> dpx;  // D_f(p, x_n) in order
    dpx.push_back(bregman_distance(prob.f, p, x1));
    auto watch = [&](const StageTrace& t) {
      Sweeper::observe_max(feas, prob.constraint.violation(t.x), "x feasibility");
      const double alpha = cfg.alpha.at(t.n);
      const double lhs = bregman_distance(prob.f, p, t.y);
      const double rhs = alpha * dp0 + (1.0 - alpha) * bregman_distance(prob.f, p, t.x);
      Sweeper::observe_min(stage, rhs - lhs, "n=" + std::to_string(t.n));
    };
    auto run = run_main(prob, cfg, x1, watch);
    for (std::size_t i = 1; i < run.records.size(); ++i)
      dpx.push_back(bregman_distance(prob.f, p, run.records[i].x));
    dpx.push_back(bregman_distance(prob.f, p, run.final_x));
    for (std::size_t i = 0; i + 1 < dpx.size(); ++i)
      Sweeper::observe_min(bound, std::max(dp0, dpx[i]) - dpx[i + 1],
                           "n=" + std::to_string(i + 1));
  }

  // Baseline on a fully degenerate problem: the trace is constant up to
  // the rounding of the dual convex mixes.
  {
    auto& fixed = sw.max_style("baseline-identity-fixed-trace", 1e-13);
    auto prob = generate_instance("degenerate-identity", 2);
    SolverConfig cfg;
    cfg.max_iters = 25;
    cfg.stop_residual = 0.0;
    Vec x1 = Vec::Constant(2, 0.4);
    auto run = run_kumam(prob, cfg, x1);
    for (const auto& rec : run.records)
      Sweeper::observe_max(fixed, (rec.x - x1).norm(), "n=" + std::to_string(rec.n));
  }
}

void sweep_rng(Sweeper& sw) {
  Rng a(sw.rng.raw()), b(a);
  bool same = true;
  for (int i = 0; i < 64; ++i) same = same && a.raw() == b.raw();
  sw.flag("rng-copy-replays-identically", same, same ? 0.0 : 1.0, 0.0, "64 draws");

  auto& range = sw.max_style("rng-uniform01-in-unit-interval", 0.0);
  Rng c(12345);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform01();
    Sweeper::observe_max(range, u < 0.0 || u >= 1.0 ? 1.0 : 0.0, "draw " + std::to_string(i));
  }
  auto& idx = sw.max_style("rng-index-in-range", 0.0);
  for (int i = 0; i < 10000; ++i)
    Sweeper::observe_max(idx, c.index(7) >= 7 ? 1.0 : 0.0, "draw " + std::to_string(i));
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const auto& s : sweeps)
    if (!s.pass) return false;
  return true;
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["all_pass"] = all_pass();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : sweeps) {
    nlohmann::ordered_json row;
    row["name"] = s.name;
    row["pass"] = s.pass;
    row["worst"] = s.worst;
    row["bound"] = s.bound;
    row["samples"] = s.samples;
    row["detail"] = s.detail;
    arr.push_back(std::move(row));
  }
  doc["sweeps"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string VerifyReport::to_text() const {
  std::ostringstream out;
  for (const auto& s : sweeps)
    out << (s.pass ? "[PASS] " : "[FAIL] ") << s.name << "  worst=" << s.worst
        << " bound=" << s.bound << " samples=" << s.samples
        << (s.pass || s.detail.empty() ? "" : "  at " + s.detail) << "\n";
  out << (all_pass() ? "all sweeps passed" : "SWEEP FAILURES PRESENT") << "\n";
  return out.str();
}

VerifyReport verify_suite(std::uint64_t seed) {
  Sweeper sw(seed);
  const std::vector<std::pair<const char*, void (*)(Sweeper&)>> stages{
      {"identities", sweep_identities},
      {"conjugacy", sweep_conjugacy},
      {"gradient-fd", sweep_gradient_fd},
      {"jensen", sweep_jensen},
      {"total-convexity", sweep_total_convexity},
      {"projections", sweep_projections},
      {"euclidean-oracle", sweep_euclidean_oracle},
      {"grid-oracle", sweep_grid_oracle},
      {"resolvents", sweep_resolvents},
      {"resolvent-linear-oracle", sweep_resolvent_linear_oracle},
      {"operators", sweep_operators},
      {"axioms", sweep_axioms},
      {"solver", sweep_solver},
      {"rng", sweep_rng},
  };
  for (const auto& [name, stage] : stages) {
    try {
      stage(sw);
    } catch (const std::exception& e) {
      // Failures must surface as report entries, never as exceptions.
      sw.flag(std::string(name) + "-sweep-aborted", false, 0.0, 0.0, e.what());
    }
  }
  return VerifyReport{{sw.results.begin(), sw.results.end()}};
}

Vec grid_min_bregman_2d(const LegendreFunction& f, const ConvexSet& set, const Vec& x,
                        double target_step) {
  if (f.dim() != 2 || set.dim() != 2)
    throw ArgumentError("grid_min_bregman_2d: two-dimensional problems only");
  if (!(target_step > 0.0)) throw ArgumentError("grid_min_bregman_2d: step must be positive");

  Vec center = set.euclidean_project(x);
  double span = set.diameter_hint();
  double half;
  if (std::isfinite(span)) {
    half = 0.5 * span + 2.0 * target_step;
  } else {
    // Window radius from the level set: the minimizer z obeys
    // D_f(z, x) <= D_f(center, x) <= mu/2 |z - x|^2 for mu-strongly convex f,
    // which the two quadratic kinds are.
    double mu;
    if (f.kind() == LegendreKind::SquaredNorm) {
      mu = 1.0;
    } else if (f.kind() == LegendreKind::QuadraticForm) {
      mu = Eigen::SelfAdjointEigenSolver<Mat>(f.matrix()).eigenvalues().minCoeff();
    } else {
      throw ArgumentError(
          "grid_min_bregman_2d: unbounded sets need a uniformly convex geometry");
    }
    const double d0 = f.in_closure(center) ? bregman_distance(f, center, x) : 0.0;
    half = (x - center).norm() + std::sqrt(2.0 * std::max(d0, 0.0) / mu) + 1.0;
  }

  const int n = 20;  // 41 x 41 nodes per level
  Vec best = center;
  double best_val = f.in_closure(best) ? bregman_distance(f, best, x)
                                       : std::numeric_limits<double>::infinity();
  int passes = 0;
  while (true) {
    const double step = half / n;
    bool on_edge = false;
    for (int i = -n; i <= n; ++i) {
      for (int j = -n; j <= n; ++j) {
        Vec z(2);
        z << center[0] + step * i, center[1] + step * j;
        // Outside nodes contribute their boundary projection instead of
        // being skipped; constrained minima sit exactly on the boundary,
        // and lattice nodes only ever straddle it.
        if (!set.contains(z, 0.0)) z = set.euclidean_project(z);
        if (!set.contains(z, 1e-9) || !f.in_closure(z)) continue;
        const double val = bregman_distance(f, z, x);
        if (val < best_val) {
          best_val = val;
          best = z;
          on_edge = std::abs(i) == n || std::abs(j) == n;
        }
      }
    }
    center = best;
    // A winner on the window edge means the minimum may still be outside;
    // march the window there at the same scale instead of shrinking, or a
    // narrow diagonal valley would strand the scan far from the bottom.
    if (!on_edge) {
      if (step <= target_step) break;
      half = 2.5 * step;
    }
    if (++passes > 500) break;
  }
  return best;
}

}  // namespace bregkit
