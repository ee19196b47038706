#include "bregkit/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bregkit/instances.hpp"
#include "json.hpp"

namespace bregkit {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ArgumentError("spec: " + where + ": " + what);
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const auto& key : allowed) ok = ok || key == item.key();
    if (!ok) bad(where, "unknown field '" + item.key() + "'");
  }
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where, "missing required field '" + key + "'");
  return *it;
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<long>();
}

std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Vec vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = num(j[static_cast<std::size_t>(i)], where);
  return v;
}

Mat matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected an array of rows");
  const auto rows = static_cast<int>(j.size());
  Vec first = vec(j[0], where + "[0]");
  Mat m(rows, first.size());
  m.row(0) = first;
  for (int r = 1; r < rows; ++r) {
    Vec row = vec(j[static_cast<std::size_t>(r)], where + " row");
    if (row.size() != m.cols()) bad(where, "ragged matrix");
    m.row(r) = row;
  }
  return m;
}

ConvexSet parse_set(const json& j, const std::string& where) {
  const std::string kind = str(field(j, "kind", where), where + ".kind");
  if (kind == "halfspace") {
    check_keys(j, {"kind", "normal", "offset"}, where);
    return ConvexSet::halfspace(vec(field(j, "normal", where), where + ".normal"),
                                num(field(j, "offset", where), where + ".offset"));
  }
  if (kind == "hyperplane") {
    check_keys(j, {"kind", "normal", "offset"}, where);
    return ConvexSet::hyperplane(vec(field(j, "normal", where), where + ".normal"),
                                 num(field(j, "offset", where), where + ".offset"));
  }
  if (kind == "box") {
    check_keys(j, {"kind", "lower", "upper"}, where);
    return ConvexSet::box(vec(field(j, "lower", where), where + ".lower"),
                          vec(field(j, "upper", where), where + ".upper"));
  }
  if (kind == "ball") {
    check_keys(j, {"kind", "center", "radius"}, where);
    return ConvexSet::ball(vec(field(j, "center", where), where + ".center"),
                           num(field(j, "radius", where), where + ".radius"));
  }
  if (kind == "simplex") {
    check_keys(j, {"kind", "dim", "scale"}, where);
    return ConvexSet::simplex(static_cast<int>(integer(field(j, "dim", where), where + ".dim")),
                              num(field(j, "scale", where), where + ".scale"));
  }
  if (kind == "intersection") {
    check_keys(j, {"kind", "members", "witness"}, where);
    const json& arr = field(j, "members", where);
    if (!arr.is_array() || arr.empty()) bad(where, "members must be a nonempty array");
    std::vector<ConvexSet> members;
    for (std::size_t i = 0; i < arr.size(); ++i)
      members.push_back(parse_set(arr[i], where + ".members[" + std::to_string(i) + "]"));
    std::optional<Vec> witness;
    if (j.contains("witness")) witness = vec(j["witness"], where + ".witness");
    return ConvexSet::intersection(std::move(members), std::move(witness));
  }
  bad(where, "unknown set kind '" + kind + "'");
}

LegendreFunction parse_legendre(const json& j, const std::string& where) {
  const std::string kind = str(field(j, "kind", where), where + ".kind");
  if (kind == "squared_norm") {
    check_keys(j, {"kind", "dim"}, where);
    return LegendreFunction::squared_norm(
        static_cast<int>(integer(field(j, "dim", where), where + ".dim")));
  }
  if (kind == "quadratic_form") {
    check_keys(j, {"kind", "matrix"}, where);
    return LegendreFunction::quadratic_form(matrix(field(j, "matrix", where), where + ".matrix"));
  }
  if (kind == "p_norm") {
    check_keys(j, {"kind", "dim", "p"}, where);
    return LegendreFunction::p_norm(
        static_cast<int>(integer(field(j, "dim", where), where + ".dim")),
        num(field(j, "p", where), where + ".p"));
  }
  if (kind == "negative_entropy") {
    check_keys(j, {"kind", "dim"}, where);
    return LegendreFunction::negative_entropy(
        static_cast<int>(integer(field(j, "dim", where), where + ".dim")));
  }
  bad(where, "unknown geometry kind '" + kind + "'");
}

ConvexHandle parse_handle(const json& j, const std::string& where) {
  const std::string kind = str(field(j, "kind", where), where + ".kind");
  if (kind == "l1") {
    check_keys(j, {"kind", "weight"}, where);
    return ConvexHandle::l1(num(field(j, "weight", where), where + ".weight"));
  }
  if (kind == "linear") {
    check_keys(j, {"kind", "cost"}, where);
    return ConvexHandle::linear(vec(field(j, "cost", where), where + ".cost"));
  }
  if (kind == "max_coordinate") {
    check_keys(j, {"kind", "weight"}, where);
    return ConvexHandle::max_coordinate(num(field(j, "weight", where), where + ".weight"));
  }
  bad(where, "unknown handle kind '" + kind + "'");
}

Bifunction parse_bifunction(const json& j, const ConvexSet& feasible, const std::string& where) {
  const std::string kind = str(field(j, "kind", where), where + ".kind");
  if (kind == "linear_monotone") {
    check_keys(j, {"kind", "matrix", "shift"}, where);
    Mat a = matrix(field(j, "matrix", where), where + ".matrix");
    Vec c = j.contains("shift") ? vec(j["shift"], where + ".shift") : Vec(Vec::Zero(a.rows()));
    return Bifunction::linear_monotone(std::move(a), std::move(c), feasible);
  }
  if (kind == "proximal_convex") {
    check_keys(j, {"kind", "handle"}, where);
    return Bifunction::proximal_convex(parse_handle(field(j, "handle", where), where + ".handle"),
                                       feasible);
  }
  bad(where, "unknown bifunction kind '" + kind + "'");
}

QbneOperator parse_operator(const json& j, const LegendreFunction& f, const ConvexSet& feasible,
                            const std::string& where) {
  const std::string kind = str(field(j, "kind", where), where + ".kind");
  if (kind == "projection") {
    check_keys(j, {"kind", "target"}, where);
    return QbneOperator::projection(f, parse_set(field(j, "target", where), where + ".target"));
  }
  if (kind == "resolvent") {
    check_keys(j, {"kind", "bifunction", "tol"}, where);
    double tol = j.contains("tol") ? num(j["tol"], where + ".tol") : 1e-10;
    return QbneOperator::resolvent(
        f, parse_bifunction(field(j, "bifunction", where), feasible, where + ".bifunction"), tol);
  }
  if (kind == "composition") {
    check_keys(j, {"kind", "factors"}, where);
    const json& arr = field(j, "factors", where);
    if (!arr.is_array() || arr.empty()) bad(where, "factors must be a nonempty array");
    std::vector<QbneOperator> factors;
    for (std::size_t i = 0; i < arr.size(); ++i)
      factors.push_back(
          parse_operator(arr[i], f, feasible, where + ".factors[" + std::to_string(i) + "]"));
    return QbneOperator::composition(std::move(factors));
  }
  bad(where, "unknown operator kind '" + kind + "'");
}

ProblemInstance parse_inline_instance(const json& j) {
  const std::string where = "instance";
  check_keys(j,
             {"name", "f", "constraint", "bifunctions", "operators", "reference_solution",
              "solution_set", "default_anchor"},
             where);
  LegendreFunction f = parse_legendre(field(j, "f", where), where + ".f");
  ConvexSet constraint = parse_set(field(j, "constraint", where), where + ".constraint");

  const json& garr = field(j, "bifunctions", where);
  if (!garr.is_array() || garr.empty()) bad(where, "bifunctions must be a nonempty array");
  std::vector<Bifunction> gs;
  for (std::size_t i = 0; i < garr.size(); ++i)
    gs.push_back(parse_bifunction(garr[i], constraint,
                                  where + ".bifunctions[" + std::to_string(i) + "]"));

  const json& tarr = field(j, "operators", where);
  if (!tarr.is_array() || tarr.empty()) bad(where, "operators must be a nonempty array");
  std::vector<QbneOperator> ts;
  for (std::size_t i = 0; i < tarr.size(); ++i)
    ts.push_back(
        parse_operator(tarr[i], f, constraint, where + ".operators[" + std::to_string(i) + "]"));

  ProblemInstance prob{
      j.contains("name") ? str(j["name"], where + ".name") : std::string("inline"),
      std::move(f),
      std::move(constraint),
      std::move(gs),
      std::move(ts),
      std::nullopt,
      std::nullopt,
      std::nullopt,
  };
  if (j.contains("reference_solution"))
    prob.reference_solution = vec(j["reference_solution"], where + ".reference_solution");
  if (j.contains("solution_set"))
    prob.solution_set = parse_set(j["solution_set"], where + ".solution_set");
  if (j.contains("default_anchor"))
    prob.default_anchor = vec(j["default_anchor"], where + ".default_anchor");
  validate_reference(prob);
  return prob;
}

SolverConfig parse_config(const json& j, std::uint64_t seed) {
  const std::string where = "config";
  SolverConfig cfg;
  cfg.rng_seed = seed;
  if (j.is_null()) return cfg;
  check_keys(j,
             {"alpha_a", "alpha_b", "beta", "max_iters", "stop_residual", "resolvent_tol",
              "resolvent_order", "anchor", "strict_zero_anchor", "ep_probe_count"},
             where);
  if (j.contains("alpha_a")) cfg.alpha.a = num(j["alpha_a"], where + ".alpha_a");
  if (j.contains("alpha_b")) cfg.alpha.b = num(j["alpha_b"], where + ".alpha_b");
  if (j.contains("beta")) cfg.beta = num(j["beta"], where + ".beta");
  if (j.contains("max_iters")) cfg.max_iters = integer(j["max_iters"], where + ".max_iters");
  if (j.contains("stop_residual"))
    cfg.stop_residual = num(j["stop_residual"], where + ".stop_residual");
  if (j.contains("resolvent_tol"))
    cfg.resolvent_tol = num(j["resolvent_tol"], where + ".resolvent_tol");
  if (j.contains("resolvent_order")) {
    const std::string order = str(j["resolvent_order"], where + ".resolvent_order");
    if (order == "composed")
      cfg.resolvent_order = ResolventOrder::Composed;
    else if (order == "cyclic")
      cfg.resolvent_order = ResolventOrder::Cyclic;
    else
      bad(where + ".resolvent_order", "expected 'composed' or 'cyclic'");
  }
  if (j.contains("anchor")) cfg.anchor = vec(j["anchor"], where + ".anchor");
  if (j.contains("strict_zero_anchor")) {
    if (!j["strict_zero_anchor"].is_boolean())
      bad(where + ".strict_zero_anchor", "expected a boolean");
    cfg.strict_zero_anchor = j["strict_zero_anchor"].get<bool>();
  }
  if (j.contains("ep_probe_count"))
    cfg.ep_probe_count = static_cast<int>(integer(j["ep_probe_count"], where + ".ep_probe_count"));
  return cfg;
}

Vec default_start(const ProblemInstance& prob) {
  const Vec& w = prob.constraint.witness();
  if (!prob.f.in_interior(w))
    throw ArgumentError("spec: cannot derive a start point; supply x1 explicitly");
  return w;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("short write to " + path.string());
}

void append_cell(std::string& row, double v) {
  if (std::isnan(v)) {
    row += "nan";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  row += buf;
}

std::string trace_csv(const RunResult& result, int dim) {
  std::string text = "n";
  for (int i = 0; i < dim; ++i) text += ",x_" + std::to_string(i);
  text +=
      ",dist_to_ref,dist_to_proj_anchor0,dist_to_proj_x1,ep_residual_max,"
      "fixpoint_residual,step_norm\n";
  for (const auto& rec : result.records) {
    std::string row = std::to_string(rec.n);
    for (int i = 0; i < dim; ++i) {
      row += ',';
      append_cell(row, rec.x[i]);
    }
    for (double v : {rec.dist_to_ref, rec.dist_to_proj_anchor0, rec.dist_to_proj_x1,
                     rec.ep_residual_max, rec.fixpoint_residual, rec.step_norm}) {
      row += ',';
      append_cell(row, v);
    }
    row += '\n';
    text += row;
  }
  return text;
}

json num_or_null(double v) { return std::isnan(v) ? json() : json(v); }

json vec_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

std::string trace_json(const RunResult& result) {
  json rows = json::array();
  for (const auto& rec : result.records) {
    json row;
    row["n"] = rec.n;
    row["x"] = vec_json(rec.x);
    row["dist_to_ref"] = num_or_null(rec.dist_to_ref);
    row["dist_to_proj_anchor0"] = num_or_null(rec.dist_to_proj_anchor0);
    row["dist_to_proj_x1"] = num_or_null(rec.dist_to_proj_x1);
    row["ep_residual_max"] = num_or_null(rec.ep_residual_max);
    row["fixpoint_residual"] = num_or_null(rec.fixpoint_residual);
    row["step_norm"] = num_or_null(rec.step_norm);
    rows.push_back(std::move(row));
  }
  return rows.dump(2) + "\n";
}

std::string summary_json(const ExperimentSpec& spec, const RunResult& result) {
  const IterationRecord& last = result.records.back();
  json doc;
  doc["name"] = spec.name;
  doc["instance"] = spec.instance.name;
  doc["solver"] = spec.solver == SolverChoice::Main ? "main" : "kumam";
  doc["seed"] = spec.seed;
  doc["dim"] = spec.instance.dim();
  doc["iterations"] = result.iterations;
  doc["stop_reason"] = result.stop_reason;
  doc["x1"] = vec_json(spec.x1);
  doc["final_x"] = vec_json(result.final_x);
  json fin;
  fin["dist_to_ref"] = num_or_null(last.dist_to_ref);
  fin["dist_to_proj_anchor0"] = num_or_null(last.dist_to_proj_anchor0);
  fin["dist_to_proj_x1"] = num_or_null(last.dist_to_proj_x1);
  fin["ep_residual_max"] = num_or_null(last.ep_residual_max);
  fin["fixpoint_residual"] = num_or_null(last.fixpoint_residual);
  fin["step_norm"] = num_or_null(last.step_norm);
  doc["final"] = std::move(fin);
  doc["proj_from_anchor"] =
      result.proj_from_anchor ? vec_json(*result.proj_from_anchor) : json();
  doc["proj_from_start"] = result.proj_from_start ? vec_json(*result.proj_from_start) : json();
  return doc.dump(2) + "\n";
}

}  // namespace

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("spec: not valid JSON: ") + e.what());
  }
  check_keys(doc, {"name", "seed", "instance", "dim", "solver", "config", "x1", "output"},
             "top level");

  const json& jseed = field(doc, "seed", "top level");
  if (!jseed.is_number_unsigned()) bad("seed", "expected a nonnegative integer");

  ExperimentSpec spec{
      "",
      jseed.get<std::uint64_t>(),
      [&] {
        const json& inst = field(doc, "instance", "top level");
        if (inst.is_string()) {
          int d = 0;
          if (doc.contains("dim")) d = static_cast<int>(integer(doc["dim"], "dim"));
          return generate_instance(inst.get<std::string>(), d, jseed.get<std::uint64_t>());
        }
        if (doc.contains("dim")) bad("dim", "only valid with a named instance");
        return parse_inline_instance(inst);
      }(),
      SolverChoice::Main,
      SolverConfig{},
      Vec(),
      TraceFormat::Csv,
      "",
      "",
  };

  if (doc.contains("solver")) {
    const std::string solver = str(doc["solver"], "solver");
    if (solver == "main")
      spec.solver = SolverChoice::Main;
    else if (solver == "kumam")
      spec.solver = SolverChoice::Kumam;
    else
      bad("solver", "expected 'main' or 'kumam'");
  }

  spec.config = parse_config(doc.contains("config") ? doc["config"] : json(), spec.seed);
  spec.x1 = doc.contains("x1") ? vec(doc["x1"], "x1") : default_start(spec.instance);
  spec.name = doc.contains("name") ? str(doc["name"], "name") : spec.instance.name;
  spec.run_dir_name = spec.name;

  if (doc.contains("output")) {
    const json& out = doc["output"];
    check_keys(out, {"format", "dir"}, "output");
    if (out.contains("format")) {
      const std::string fmt = str(out["format"], "output.format");
      if (fmt == "csv")
        spec.format = TraceFormat::Csv;
      else if (fmt == "json")
        spec.format = TraceFormat::Json;
      else
        bad("output.format", "expected 'csv' or 'json'");
    }
    if (out.contains("dir")) spec.run_dir_name = str(out["dir"], "output.dir");
  }
  if (spec.run_dir_name.empty() ||
      spec.run_dir_name.find_first_of("/\\") != std::string::npos)
    bad("output.dir", "run directory name must be a plain nonempty name");

  spec.canonical_text = doc.dump(2) + "\n";
  return spec;
}

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read spec file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
  RunResult result = spec.solver == SolverChoice::Main
                         ? run_main(spec.instance, spec.config, spec.x1)
                         : run_kumam(spec.instance, spec.config, spec.x1);
  if (result.records.empty()) throw ConvergenceError("run produced no iterations");

  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / spec.run_dir_name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  if (spec.format == TraceFormat::Csv)
    write_text_file(dir / "trace.csv", trace_csv(result, spec.instance.dim()));
  else
    write_text_file(dir / "trace.json", trace_json(result));
  write_text_file(dir / "summary.json", summary_json(spec, result));
  write_text_file(dir / "spec.json", spec.canonical_text);

  return ExperimentOutcome{dir.string(), std::move(result)};
}

}  // namespace bregkit
