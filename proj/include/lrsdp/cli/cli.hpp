#pragma once
// Command-line front end: instance generation, solving, report verification,
// and batch benchmarking.
//
//   lrsdp solve    --kind stableset --graph g.txt [--eps 1e-5] [--out report.json]
//   lrsdp solve    --kind phaseretrieval --manifest inst.manifest.json ...
//   lrsdp solve    --kind matcomp (--obs inst.obs.csv | --manifest ...) ...
//   lrsdp generate phaseretrieval --n 128 --seed 7 [--out base]
//   lrsdp generate matcomp --n1 50 --n2 50 --r 2 --seed 1 [--out base]
//   lrsdp verify   --report report.json
//   lrsdp bench    --list instances.txt [--out bench.csv] [solve flags]
//
// Exit codes: 0 success (solve: status Solved; verify: all checks match),
// 2 argument/config/input errors, 3 solver finished without Solved status or
// verification mismatch (the report is still written on 3).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lrsdp/problems/graph.hpp"
#include "lrsdp/problems/manifest.hpp"
#include "lrsdp/problems/matrix_completion.hpp"
#include "lrsdp/problems/phase_retrieval.hpp"
#include "lrsdp/problems/stable_set.hpp"
#include "lrsdp/solver/al.hpp"
#include "lrsdp/util/json.hpp"

namespace lrsdp::cli {

// Raised for malformed invocations; always maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

inline const char* usage_text() {
  return
      "usage: lrsdp <command> [options]\n"
      "\n"
      "commands:\n"
      "  solve     solve one instance and write a JSON report\n"
      "  generate  create a synthetic instance plus its manifest\n"
      "  verify    recompute a report's residuals from its stored solution\n"
      "  bench     solve a list of instances and write a CSV summary\n"
      "\n"
      "solve options:\n"
      "  --kind K          stableset | phaseretrieval | matcomp\n"
      "  --graph PATH      graph file (stableset)\n"
      "  --obs PATH        observation CSV (matcomp)\n"
      "  --manifest PATH   instance manifest (phaseretrieval, matcomp)\n"
      "  --eps X           relative tolerance (default 1e-5)\n"
      "  --mode M          relative (default) | theory\n"
      "  --eps-p X         feasibility target (theory mode)\n"
      "  --eps-c X         complementarity target (theory mode)\n"
      "  --seed N          random seed for the initial factor (default 0)\n"
      "  --time-cap S      wall-clock budget in seconds (0 = none)\n"
      "  --out PATH        report path (default report.json)\n"
      "  --trace PATH      also write a per-iteration CSV trace\n"
      "  --beta0 X --sigma X --chi X --lambda0 X --rho-bar X --s-trigger N\n"
      "                    solver parameter overrides\n"
      "\n"
      "generate options:\n"
      "  lrsdp generate phaseretrieval --n N --seed S [--out BASE]\n"
      "  lrsdp generate matcomp --n1 N --n2 N --r R --seed S [--out BASE]\n"
      "\n"
      "verify options:\n"
      "  --report PATH     report to check (tolerance 1e-9)\n"
      "\n"
      "bench options:\n"
      "  --list PATH       text file, one \"kind path\" pair per line\n"
      "  --out PATH        CSV output (default bench.csv)\n"
      "  (solve tolerance/override flags apply to every instance;\n"
      "   LRSDP_THREADS sets the worker count)\n";
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string command;   // solve | generate | verify | bench
  std::string kind;      // stableset | phaseretrieval | matcomp
  std::string graph;     // stableset source
  std::string obs;       // matcomp source (observation CSV)
  std::string manifest;  // synthetic-instance source
  std::string report;    // verify input
  std::string list;      // bench input
  std::string out;       // report path / generate base / bench CSV
  std::string trace;     // optional per-iteration CSV

  double eps = 1e-5;
  std::string mode = "relative";  // relative | theory
  double eps_p = 0;
  double eps_c = 0;
  std::uint64_t seed = 0;
  double time_cap = 0;  // seconds; 0 disables

  // Solver parameter overrides (defaults match the solver's own defaults).
  double beta0 = 0;  // <= 0 selects the solver's automatic choice
  double sigma = 0.3;
  double chi = 0.01;
  double lambda0 = 1.0;
  double rho_bar = 0;      // <= 0 selects the solver's automatic choice
  long long s_trigger = -2;  // -2 auto, -1 disables recompression, >= 0 explicit

  // Generator parameters.
  long long n = 0;
  long long n1 = 0;
  long long n2 = 0;
  long long r = 0;
};

namespace detail {

inline double parse_double(const std::string& flag, const std::string& tok) {
  char* end = nullptr;
  const double x = std::strtod(tok.c_str(), &end);
  if (end == nullptr || *end != '\0' || tok.empty())
    throw UsageError("flag " + flag + " needs a numeric value, got \"" + tok + "\"");
  return x;
}

inline long long parse_int(const std::string& flag, const std::string& tok) {
  char* end = nullptr;
  const long long x = std::strtoll(tok.c_str(), &end, 10);
  if (end == nullptr || *end != '\0' || tok.empty())
    throw UsageError("flag " + flag + " needs an integer value, got \"" + tok + "\"");
  return x;
}

inline std::uint64_t parse_uint64(const std::string& flag, const std::string& tok) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(tok.c_str(), &end, 10);
  if (end == nullptr || *end != '\0' || tok.empty() || tok[0] == '-')
    throw UsageError("flag " + flag + " needs a nonnegative integer, got \"" + tok + "\"");
  return x;
}

inline const std::string& next_value(const std::vector<std::string>& args,
                                     std::size_t& i, const std::string& flag) {
  if (i + 1 >= args.size()) throw UsageError("flag " + flag + " needs a value");
  return args[++i];
}

}  // namespace detail

inline RunConfig parse_args(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("no command given");
  RunConfig rc;
  rc.command = args[0];
  if (rc.command != "solve" && rc.command != "generate" && rc.command != "verify" &&
      rc.command != "bench")
    throw UsageError("unknown command: " + rc.command);

  std::size_t i = 1;
  if (rc.command == "generate") {
    if (i >= args.size() || args[i].rfind("--", 0) == 0)
      throw UsageError("generate needs an instance kind (phaseretrieval | matcomp)");
    rc.kind = args[i++];
  }

  for (; i < args.size(); ++i) {
    const std::string& a = args[i];
    using detail::next_value;
    if (a == "--kind") rc.kind = next_value(args, i, a);
    else if (a == "--graph") rc.graph = next_value(args, i, a);
    else if (a == "--obs") rc.obs = next_value(args, i, a);
    else if (a == "--manifest") rc.manifest = next_value(args, i, a);
    else if (a == "--report") rc.report = next_value(args, i, a);
    else if (a == "--list") rc.list = next_value(args, i, a);
    else if (a == "--out") rc.out = next_value(args, i, a);
    else if (a == "--trace") rc.trace = next_value(args, i, a);
    else if (a == "--eps") rc.eps = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--mode") rc.mode = next_value(args, i, a);
    else if (a == "--eps-p") rc.eps_p = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--eps-c") rc.eps_c = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--seed") rc.seed = detail::parse_uint64(a, next_value(args, i, a));
    else if (a == "--time-cap") rc.time_cap = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--beta0") rc.beta0 = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--sigma") rc.sigma = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--chi") rc.chi = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--lambda0") rc.lambda0 = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--rho-bar") rc.rho_bar = detail::parse_double(a, next_value(args, i, a));
    else if (a == "--s-trigger") rc.s_trigger = detail::parse_int(a, next_value(args, i, a));
    else if (a == "--n") rc.n = detail::parse_int(a, next_value(args, i, a));
    else if (a == "--n1") rc.n1 = detail::parse_int(a, next_value(args, i, a));
    else if (a == "--n2") rc.n2 = detail::parse_int(a, next_value(args, i, a));
    else if (a == "--r") rc.r = detail::parse_int(a, next_value(args, i, a));
    else throw UsageError("unknown flag: " + a);
  }

  if (rc.mode != "relative" && rc.mode != "theory")
    throw UsageError("--mode must be relative or theory");
  if (rc.mode == "theory" && !(rc.eps_p > 0 && rc.eps_c > 0))
    throw UsageError("theory mode needs --eps-p and --eps-c > 0");
  if (rc.eps <= 0) throw UsageError("--eps must be positive");
  if (rc.time_cap < 0) throw UsageError("--time-cap must be nonnegative");

  if (rc.command == "solve") {
    if (rc.kind == "stableset") {
      if (rc.graph.empty()) throw UsageError("solve --kind stableset needs --graph");
    } else if (rc.kind == "phaseretrieval") {
      if (rc.manifest.empty())
        throw UsageError("solve --kind phaseretrieval needs --manifest");
    } else if (rc.kind == "matcomp") {
      if (rc.obs.empty() == rc.manifest.empty())
        throw UsageError("solve --kind matcomp needs exactly one of --obs, --manifest");
    } else {
      throw UsageError("solve needs --kind stableset | phaseretrieval | matcomp");
    }
    if (rc.out.empty()) rc.out = "report.json";
  } else if (rc.command == "generate") {
    if (rc.kind == "phaseretrieval") {
      if (rc.n < 1) throw UsageError("generate phaseretrieval needs --n >= 1");
    } else if (rc.kind == "matcomp") {
      if (rc.n1 < 1 || rc.n2 < 1 || rc.r < 1)
        throw UsageError("generate matcomp needs --n1, --n2, --r >= 1");
    } else {
      throw UsageError("generate kind must be phaseretrieval or matcomp");
    }
    if (rc.out.empty()) rc.out = "instance";
  } else if (rc.command == "verify") {
    if (rc.report.empty()) throw UsageError("verify needs --report");
  } else {  // bench
    if (rc.list.empty()) throw UsageError("bench needs --list");
    if (rc.out.empty()) rc.out = "bench.csv";
  }
  return rc;
}

inline json::Value config_to_json(const RunConfig& rc) {
  json::Value v = json::Value::object();
  v.set("command", json::Value::of(rc.command));
  v.set("kind", json::Value::of(rc.kind));
  v.set("graph", json::Value::of(rc.graph));
  v.set("obs", json::Value::of(rc.obs));
  v.set("manifest", json::Value::of(rc.manifest));
  v.set("report", json::Value::of(rc.report));
  v.set("list", json::Value::of(rc.list));
  v.set("out", json::Value::of(rc.out));
  v.set("trace", json::Value::of(rc.trace));
  v.set("eps", json::Value::of(rc.eps));
  v.set("mode", json::Value::of(rc.mode));
  v.set("eps_p", json::Value::of(rc.eps_p));
  v.set("eps_c", json::Value::of(rc.eps_c));
  if (rc.seed <= (1ull << 53))
    v.set("seed", json::Value::of(static_cast<double>(rc.seed)));
  else
    v.set("seed", json::Value::of(std::to_string(rc.seed)));
  v.set("time_cap", json::Value::of(rc.time_cap));
  v.set("beta0", json::Value::of(rc.beta0));
  v.set("sigma", json::Value::of(rc.sigma));
  v.set("chi", json::Value::of(rc.chi));
  v.set("lambda0", json::Value::of(rc.lambda0));
  v.set("rho_bar", json::Value::of(rc.rho_bar));
  v.set("s_trigger", json::Value::of(static_cast<double>(rc.s_trigger)));
  v.set("n", json::Value::of(static_cast<double>(rc.n)));
  v.set("n1", json::Value::of(static_cast<double>(rc.n1)));
  v.set("n2", json::Value::of(static_cast<double>(rc.n2)));
  v.set("r", json::Value::of(static_cast<double>(rc.r)));
  return v;
}

// Unknown keys are ignored; missing keys keep their defaults.
inline RunConfig config_from_json(const json::Value& v) {
  RunConfig rc;
  auto str = [&v](const char* key, std::string& dst) {
    if (const json::Value* p = v.find(key)) dst = p->as_string();
  };
  auto num = [&v](const char* key, double& dst) {
    if (const json::Value* p = v.find(key)) dst = p->as_number();
  };
  auto intval = [&v](const char* key, long long& dst) {
    if (const json::Value* p = v.find(key)) dst = p->as_int64();
  };
  str("command", rc.command);
  str("kind", rc.kind);
  str("graph", rc.graph);
  str("obs", rc.obs);
  str("manifest", rc.manifest);
  str("report", rc.report);
  str("list", rc.list);
  str("out", rc.out);
  str("trace", rc.trace);
  num("eps", rc.eps);
  str("mode", rc.mode);
  num("eps_p", rc.eps_p);
  num("eps_c", rc.eps_c);
  if (const json::Value* p = v.find("seed")) {
    if (p->kind == json::Value::Kind::String)
      rc.seed = std::stoull(p->as_string());
    else
      rc.seed = static_cast<std::uint64_t>(p->as_int64());
  }
  num("time_cap", rc.time_cap);
  num("beta0", rc.beta0);
  num("sigma", rc.sigma);
  num("chi", rc.chi);
  num("lambda0", rc.lambda0);
  num("rho_bar", rc.rho_bar);
  intval("s_trigger", rc.s_trigger);
  intval("n", rc.n);
  intval("n1", rc.n1);
  intval("n2", rc.n2);
  intval("r", rc.r);
  return rc;
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write file: " + path);
  out << text;
  require(out.good(), "write failed: " + path);
}

inline const json::Value& member(const json::Value& obj, const char* key) {
  const json::Value* p = obj.find(key);
  if (p == nullptr)
    throw std::runtime_error(std::string("report is missing field \"") + key + "\"");
  return *p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance plumbing: build problems, embed a rebuild recipe in the report
// ---------------------------------------------------------------------------

// The report embeds everything needed to rebuild the constraint operators, so
// verification never depends on external files:
//   {"kind":"stableset","graph_text":"..."}
//   {"kind":"matcomp","obs_text":"..."}            (from an observation CSV)
//   {"kind":"matcomp","manifest":{...}}            (from a generator manifest)
//   {"kind":"phaseretrieval","manifest":{...}}
struct PreparedInstance {
  std::string kind;
  std::string display;   // human-readable source label
  json::Value rebuild;   // recipe above
};

inline PreparedInstance prepare_instance_solve(const RunConfig& rc) {
  PreparedInstance inst;
  inst.kind = rc.kind;
  inst.rebuild = json::Value::object();
  inst.rebuild.set("kind", json::Value::of(rc.kind));
  if (rc.kind == "stableset") {
    inst.display = "stableset:" + rc.graph;
    inst.rebuild.set("graph_text", json::Value::of(detail::read_text_file(rc.graph)));
  } else if (rc.kind == "matcomp" && !rc.obs.empty()) {
    inst.display = "matcomp:" + rc.obs;
    inst.rebuild.set("obs_text", json::Value::of(detail::read_text_file(rc.obs)));
  } else {
    inst.display = rc.kind + ":" + rc.manifest;
    inst.rebuild.set("manifest", json::parse(detail::read_text_file(rc.manifest)));
  }
  return inst;
}

inline bool rebuild_is_complex(const json::Value& rebuild) {
  return detail::member(rebuild, "kind").as_string() == "phaseretrieval";
}

inline SdpProblem<Real> build_real_problem(const json::Value& rebuild) {
  const std::string kind = detail::member(rebuild, "kind").as_string();
  if (kind == "stableset") {
    std::istringstream in(detail::member(rebuild, "graph_text").as_string());
    return build_stable_set(load_graph_stream(in, "embedded graph", &std::cerr));
  }
  if (kind == "matcomp") {
    if (const json::Value* obs_text = rebuild.find("obs_text")) {
      std::istringstream in(obs_text->as_string());
      return build_matrix_completion(load_observations_stream(in, "embedded observations"));
    }
    const InstanceManifest man =
        manifest_from_json(json::dump(detail::member(rebuild, "manifest")));
    require(man.kind == "matcomp", "manifest kind does not match instance kind");
    auto it_n1 = man.params.find("n1");
    auto it_n2 = man.params.find("n2");
    auto it_r = man.params.find("r");
    require(it_n1 != man.params.end() && it_n2 != man.params.end() &&
                it_r != man.params.end(),
            "matcomp manifest needs n1, n2, r");
    auto gen = generate_matrix_completion(static_cast<int>(it_n1->second),
                                          static_cast<int>(it_n2->second),
                                          static_cast<int>(it_r->second), man.seed);
    return build_matrix_completion(gen.obs);
  }
  throw std::runtime_error("cannot rebuild real-valued instance of kind " + kind);
}

inline SdpProblem<Complex> build_complex_problem(const json::Value& rebuild) {
  const std::string kind = detail::member(rebuild, "kind").as_string();
  require(kind == "phaseretrieval", "cannot rebuild complex instance of kind " + kind);
  const InstanceManifest man =
      manifest_from_json(json::dump(detail::member(rebuild, "manifest")));
  require(man.kind == "phaseretrieval", "manifest kind does not match instance kind");
  auto it_n = man.params.find("n");
  require(it_n != man.params.end(), "phaseretrieval manifest needs n");
  return build_phase_retrieval(
      generate_phase_retrieval(static_cast<Eigen::Index>(it_n->second), man.seed));
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline SolverConfig make_solver_config(const RunConfig& rc) {
  SolverConfig cfg;
  cfg.eps = rc.eps;
  cfg.theory_mode = rc.mode == "theory";
  cfg.eps_p = rc.eps_p;
  cfg.eps_c = rc.eps_c;
  cfg.beta0 = rc.beta0;
  cfg.sigma = rc.sigma;
  cfg.chi = rc.chi;
  cfg.lambda0 = rc.lambda0;
  cfg.rho_bar = rc.rho_bar;
  cfg.s_trigger = static_cast<int>(rc.s_trigger);
  cfg.seed = rc.seed;
  cfg.time_cap_s =
      rc.time_cap > 0 ? rc.time_cap : std::numeric_limits<double>::infinity();
  return cfg;
}

namespace detail {

template <class S>
json::Value factor_to_json(const Mat<S>& U) {
  json::Value f = json::Value::object();
  f.set("rows", json::Value::of(static_cast<double>(U.rows())));
  f.set("cols", json::Value::of(static_cast<double>(U.cols())));
  f.set("complex", json::Value::of(is_complex_v<S>));
  json::Value data = json::Value::array();
  for (Eigen::Index j = 0; j < U.cols(); ++j)
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      if constexpr (is_complex_v<S>) {
        data.push(json::Value::of(U(i, j).real()));
        data.push(json::Value::of(U(i, j).imag()));
      } else {
        data.push(json::Value::of(U(i, j)));
      }
    }
  f.set("data", std::move(data));
  return f;
}

template <class S>
Mat<S> factor_from_json(const json::Value& f) {
  const Eigen::Index rows = static_cast<Eigen::Index>(member(f, "rows").as_int64());
  const Eigen::Index cols = static_cast<Eigen::Index>(member(f, "cols").as_int64());
  const bool want_complex = member(f, "complex").as_bool();
  require(want_complex == is_complex_v<S>, "factor scalar type does not match instance");
  const auto& data = member(f, "data").as_array();
  const std::size_t per = is_complex_v<S> ? 2 : 1;
  require(data.size() == per * static_cast<std::size_t>(rows * cols),
          "factor data length does not match its dimensions");
  Mat<S> U(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      if constexpr (is_complex_v<S>) {
        const double re = data[k++].as_number();
        const double im = data[k++].as_number();
        U(i, j) = Complex(re, im);
      } else {
        U(i, j) = data[k++].as_number();
      }
    }
  return U;
}

inline json::Value vector_to_json(const RealVec& v) {
  json::Value a = json::Value::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push(json::Value::of(v[i]));
  return a;
}

inline RealVec vector_from_json(const json::Value& a) {
  const auto& items = a.as_array();
  RealVec v(static_cast<Eigen::Index>(items.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = items[static_cast<std::size_t>(i)].as_number();
  return v;
}

}  // namespace detail

template <class S>
json::Value make_report(const SdpProblem<S>& P, const RunConfig& rc,
                        const SolveReport<S>& rep, const PreparedInstance& inst) {
  require(P.objective_scale != 0, "objective scale must be nonzero");
  // SolveReport carries user-facing values; the internal minimization-form
  // values (where weak duality reads dval <= pval) divide the scale back out.
  const double pval_min = rep.pval / P.objective_scale;
  const double dval_min = rep.dval / P.objective_scale;

  json::Value doc = json::Value::object();
  doc.set("schema", json::Value::of(1.0));
  doc.set("instance", json::Value::of(inst.display));
  doc.set("kind", json::Value::of(inst.kind));
  doc.set("status", json::Value::of(to_string(rep.status)));

  json::Value res = json::Value::object();
  res.set("primal_rel", json::Value::of(rep.residuals.primal_rel));
  res.set("gap_rel", json::Value::of(rep.residuals.gap_rel));
  res.set("dual_rel", json::Value::of(rep.residuals.dual_rel));
  doc.set("residuals", std::move(res));

  doc.set("pval", json::Value::of(pval_min));
  doc.set("dval", json::Value::of(dval_min));
  doc.set("pval_user", json::Value::of(rep.pval));
  doc.set("dval_user", json::Value::of(rep.dval));
  doc.set("theta", json::Value::of(rep.theta));

  json::Value counters = json::Value::object();
  counters.set("outer", json::Value::of(static_cast<double>(rep.outer_iters)));
  counters.set("mev", json::Value::of(static_cast<double>(rep.hlr_iters)));
  counters.set("fista", json::Value::of(static_cast<double>(rep.fista_calls)));
  counters.set("fista_iters", json::Value::of(static_cast<double>(rep.fista_iters)));
  doc.set("counters", std::move(counters));

  json::Value ranks = json::Value::array();
  for (int r : rep.rank_history) ranks.push(json::Value::of(static_cast<double>(r)));
  doc.set("rank_history", std::move(ranks));
  json::Value betas = json::Value::array();
  for (double b : rep.beta_history) betas.push(json::Value::of(b));
  doc.set("beta_history", std::move(betas));

  doc.set("wall_time_s", json::Value::of(rep.wall_time_s));
  if (rc.seed <= (1ull << 53))
    doc.set("seed", json::Value::of(static_cast<double>(rc.seed)));
  else
    doc.set("seed", json::Value::of(std::to_string(rc.seed)));
  doc.set("config_echo", config_to_json(rc));
  doc.set("instance_rebuild", inst.rebuild);
  doc.set("objective_scale", json::Value::of(P.objective_scale));
  doc.set("factor", detail::factor_to_json(rep.U));
  doc.set("p", detail::vector_to_json(rep.p));
  doc.set("eig_residual", json::Value::of(rep.eig_residual));
  doc.set("beta_capped", json::Value::of(rep.beta_capped));
  doc.set("inner_cap_hit", json::Value::of(rep.inner_cap_hit));
  return doc;
}

template <class S>
void write_trace_csv(const std::string& path, const SolveReport<S>& rep) {
  std::ostringstream out;
  out << "iter,beta,eps_bar,feas,comp,rank,p_norm\n";
  const std::size_t T = rep.beta_history.size();
  for (std::size_t t = 0; t < T; ++t) {
    out << (t + 1) << "," << json::format_number(rep.beta_history[t]) << ","
        << json::format_number(rep.eps_bar_history[t]) << ","
        << json::format_number(rep.feas_history[t]) << ","
        << json::format_number(rep.comp_history[t]) << "," << rep.rank_history[t]
        << "," << json::format_number(rep.p_norm_history[t]) << "\n";
  }
  detail::write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

template <class S>
int solve_and_report(const SdpProblem<S>& P, const RunConfig& rc,
                     const PreparedInstance& inst) {
  const SolveReport<S> rep = al_solve(P, make_solver_config(rc));
  detail::write_text_file(rc.out, json::dump(make_report(P, rc, rep, inst), 2));
  if (!rc.trace.empty()) write_trace_csv(rc.trace, rep);
  std::cout << "status=" << to_string(rep.status)
            << " pval_user=" << json::format_number(rep.pval)
            << " dval_user=" << json::format_number(rep.dval)
            << " primal_rel=" << json::format_number(rep.residuals.primal_rel)
            << " gap_rel=" << json::format_number(rep.residuals.gap_rel)
            << " outer=" << rep.outer_iters << " rank="
            << (rep.rank_history.empty() ? 0 : rep.rank_history.back())
            << " wall_s=" << json::format_number(rep.wall_time_s) << " report="
            << rc.out << "\n";
  return rep.status == SolveStatus::Solved ? 0 : 3;
}

inline int cmd_solve(const RunConfig& rc) {
  const PreparedInstance inst = prepare_instance_solve(rc);
  if (rebuild_is_complex(inst.rebuild))
    return solve_and_report(build_complex_problem(inst.rebuild), rc, inst);
  return solve_and_report(build_real_problem(inst.rebuild), rc, inst);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

inline int cmd_generate(const RunConfig& rc) {
  InstanceManifest man;
  man.kind = rc.kind;
  man.seed = rc.seed;
  std::string instance_path;
  std::string instance_text;
  if (rc.kind == "phaseretrieval") {
    const DiffractionModel model =
        generate_phase_retrieval(static_cast<Eigen::Index>(rc.n), rc.seed);
    man.params["n"] = rc.n;
    man.params["m"] = static_cast<long long>(model.b.size());
    std::ostringstream out;
    out << model.n << " " << model.b.size() << "\n";
    for (Eigen::Index k = 0; k < model.b.size(); ++k)
      out << json::format_number(model.b[k]) << "\n";
    instance_path = rc.out + ".meas.txt";
    instance_text = out.str();
  } else {  // matcomp
    const MatrixCompletionInstance gen = generate_matrix_completion(
        static_cast<int>(rc.n1), static_cast<int>(rc.n2), static_cast<int>(rc.r),
        rc.seed);
    man.params["n1"] = rc.n1;
    man.params["n2"] = rc.n2;
    man.params["r"] = rc.r;
    man.params["m"] = static_cast<long long>(gen.obs.entries.size());
    instance_path = rc.out + ".obs.csv";
    instance_text = observations_to_text(gen.obs);
  }
  detail::write_text_file(instance_path, instance_text);
  const std::string manifest_path = rc.out + ".manifest.json";
  detail::write_text_file(manifest_path, manifest_to_json(man));
  std::cout << "wrote " << instance_path << " and " << manifest_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace detail {

struct VerifyCheck {
  std::string field;
  double stored = 0;
  double recomputed = 0;
};

// Recomputation of every certified quantity from the stored solution triple:
// feasibility and objective from the factor, dual value from (p, theta).
template <class S>
std::vector<VerifyCheck> recompute_checks(const SdpProblem<S>& P,
                                          const json::Value& doc) {
  const Mat<S> U = factor_from_json<S>(member(doc, "factor"));
  const RealVec p = vector_from_json(member(doc, "p"));
  const double theta = member(doc, "theta").as_number();
  require(U.rows() == P.n, "stored factor does not match the instance dimension");
  require(p.size() == P.m, "stored multiplier does not match the instance");
  require(theta >= 0, "stored dual shift must be nonnegative");

  const double feas = (apply_constraints(P, U) - P.b).norm();
  const double primal_rel = feas / (1.0 + P.b.norm());
  const double pval_min = objective_value(P, U);
  const double dval_min = dual_objective(P, p, theta);
  const double gap_rel = std::abs(pval_min - dval_min) /
                         (1.0 + std::abs(pval_min) + std::abs(dval_min));

  const json::Value& res = member(doc, "residuals");
  std::vector<VerifyCheck> checks;
  checks.push_back({"primal_rel", member(res, "primal_rel").as_number(), primal_rel});
  checks.push_back({"gap_rel", member(res, "gap_rel").as_number(), gap_rel});
  checks.push_back({"dual_rel", member(res, "dual_rel").as_number(), 0.0});
  checks.push_back({"pval", member(doc, "pval").as_number(), pval_min});
  checks.push_back({"dval", member(doc, "dval").as_number(), dval_min});
  const double scale = member(doc, "objective_scale").as_number();
  checks.push_back({"pval_user", member(doc, "pval_user").as_number(), scale * pval_min});
  checks.push_back({"dval_user", member(doc, "dval_user").as_number(), scale * dval_min});
  return checks;
}

}  // namespace detail

inline int cmd_verify(const RunConfig& rc) {
  const json::Value doc = json::parse(detail::read_text_file(rc.report));
  const json::Value& rebuild = detail::member(doc, "instance_rebuild");
  std::vector<detail::VerifyCheck> checks;
  if (rebuild_is_complex(rebuild))
    checks = detail::recompute_checks(build_complex_problem(rebuild), doc);
  else
    checks = detail::recompute_checks(build_real_problem(rebuild), doc);

  const double tol = 1e-9;
  bool ok = true;
  for (const auto& c : checks) {
    const double diff = std::abs(c.stored - c.recomputed);
    const double allowed = tol * (1.0 + std::max(std::abs(c.stored), std::abs(c.recomputed)));
    const bool pass = diff <= allowed;
    ok = ok && pass;
    std::cout << "verify " << c.field << ": stored=" << json::format_number(c.stored)
              << " recomputed=" << json::format_number(c.recomputed)
              << " diff=" << json::format_number(diff) << (pass ? "" : "  MISMATCH")
              << "\n";
  }
  std::cout << (ok ? "verify: OK" : "verify: FAILED") << "\n";
  return ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

inline int thread_count_from_env() {
  const char* env = std::getenv("LRSDP_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 64));
}

template <class S>
std::string bench_row(const SdpProblem<S>& P, const RunConfig& rc,
                      const std::string& path) {
  const SolveReport<S> rep = al_solve(P, make_solver_config(rc));
  int max_rank = 0;
  for (int r : rep.rank_history) max_rank = std::max(max_rank, r);
  std::ostringstream row;
  row << csv_safe(path) << "," << P.n << "," << P.m << "," << to_string(rep.status)
      << "," << json::format_number(rep.residuals.primal_rel) << ","
      << json::format_number(rep.residuals.gap_rel) << ","
      << json::format_number(rep.residuals.dual_rel) << ","
      << json::format_number(rep.pval) << "," << json::format_number(rep.dval) << ","
      << rep.outer_iters << "," << rep.hlr_iters << "," << rep.fista_calls << ","
      << max_rank << "," << json::format_number(rep.wall_time_s);
  return row.str();
}

}  // namespace detail

inline int cmd_bench(const RunConfig& rc) {
  // Parse the instance list up front so a malformed list is a config error.
  std::vector<std::pair<std::string, std::string>> instances;  // (kind, path)
  {
    std::ifstream in(rc.list);
    require(in.good(), "cannot open instance list: " + rc.list);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ls(line);
      std::string kind, path, extra;
      if (!(ls >> kind)) continue;
      if (kind[0] == '#') continue;
      if (!(ls >> path) || (ls >> extra))
        throw UsageError("instance list line " + std::to_string(line_no) +
                         ": expected \"kind path\"");
      if (kind != "stableset" && kind != "phaseretrieval" && kind != "matcomp")
        throw UsageError("instance list line " + std::to_string(line_no) +
                         ": unknown kind " + kind);
      instances.emplace_back(kind, path);
    }
  }

  std::vector<std::string> rows(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) break;
      const auto& [kind, path] = instances[i];
      try {
        RunConfig sub = rc;
        sub.kind = kind;
        sub.graph = sub.obs = sub.manifest = "";
        if (kind == "stableset") sub.graph = path;
        else if (kind == "matcomp" && path.size() >= 5 &&
                 path.compare(path.size() - 5, 5, ".json") == 0)
          sub.manifest = path;
        else if (kind == "matcomp") sub.obs = path;
        else sub.manifest = path;
        const PreparedInstance inst = prepare_instance_solve(sub);
        if (rebuild_is_complex(inst.rebuild))
          rows[i] = detail::bench_row(build_complex_problem(inst.rebuild), sub, path);
        else
          rows[i] = detail::bench_row(build_real_problem(inst.rebuild), sub, path);
      } catch (const std::exception& e) {
        rows[i] = detail::csv_safe(path) + ",0,0,Error: " + detail::csv_safe(e.what()) +
                  ",,,,,,,,,,";
      }
    }
  };

  const int threads = std::min<int>(detail::thread_count_from_env(),
                                    std::max<int>(1, static_cast<int>(instances.size())));
  if (threads <= 1 || instances.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::ostringstream out;
  out << "instance,n,m,status,primal_rel,gap_rel,dual_rel,pval,dval,outer_iters,"
         "mev_count,fista_calls,max_rank,wall_time\n";
  for (const std::string& row : rows) out << row << "\n";
  detail::write_text_file(rc.out, out.str());
  std::cout << "wrote " << rc.out << " (" << rows.size() << " instance(s))\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int cli_main(const std::vector<std::string>& args) {
  if (!args.empty() && (args[0] == "--help" || args[0] == "help")) {
    std::cout << usage_text();
    return 0;
  }
  try {
    const RunConfig rc = parse_args(args);
    if (rc.command == "solve") return cmd_solve(rc);
    if (rc.command == "generate") return cmd_generate(rc);
    if (rc.command == "verify") return cmd_verify(rc);
    return cmd_bench(rc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << usage_text();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lrsdp::cli
