// Benchmark driver: instance generation, solving, and trace normalization.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlns/dlns.hpp"

namespace {

using namespace dlns;

struct GenArgs {
  std::string family = "random";
  std::size_t n = 20;
  double p1 = 0.5;
  std::size_t d = 10;
  int cost_max = 100;
  std::size_t rows = 4;
  std::size_t cols = 5;
  std::size_t meetings = 20;
  std::string out;
};

struct SolveArgs {
  std::string algo = "tdbr";
  std::string in;
  std::string destroy = "random";
  double p_destroy = 0.5;
  std::optional<std::size_t> iters;
  std::optional<double> timeout_ms;
  std::optional<double> sim_timeout;
  double t_msg = 100.0;
  double t_cc = 1.0;
  std::size_t width_cap = 12;
  std::string init = "random";
  double dsa_p = 0.6;
  std::string trace;
  std::string summary;
};

struct NormalizeArgs {
  std::vector<std::string> traces;
  std::size_t buckets = 20;
  std::string out;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DLNS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("DLNS_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

int run_gen(const GenArgs& a, std::uint64_t seed) {
  Instance inst;
  if (a.family == "random") {
    inst = gen_random(a.n, a.p1, a.d, a.cost_max, seed);
  } else if (a.family == "scale-free") {
    inst = gen_scale_free(a.n, a.d, a.cost_max, seed);
  } else if (a.family == "grid") {
    inst = gen_grid(a.rows, a.cols, a.d, a.cost_max, seed);
  } else if (a.family == "meeting") {
    MeetingParams mp;
    mp.meetings = a.meetings;
    inst = gen_meeting(mp, seed);
  } else {
    throw ConfigError("unknown family '" + a.family + "'");
  }
  if (a.out.empty()) {
    write_instance(std::cout, inst);
  } else {
    save_instance(a.out, inst);
  }
  return 0;
}

int run_solve(const SolveArgs& a, std::uint64_t seed) {
  Instance inst = load_instance(a.in);
  if (a.algo == "exact") {
    ExactResult ex = exact_solve(inst);
    std::cout << "optimum " << ex.optimum << '\n';
    if (!ex.feasible) std::cout << "infeasible\n";
    if (!a.summary.empty()) {
      nlohmann::json j = {{"algorithm", "exact"}, {"optimum", utility_json(ex.optimum)}, {"feasible", ex.feasible}};
      write_text(a.summary, j.dump(2) + "\n");
    }
    return 0;
  }

  ClockConfig clock{a.t_cc, a.t_msg};
  InitMode init = a.init == "greedy" ? InitMode::greedy_domain : InitMode::random;
  if (a.init != "random" && a.init != "greedy") throw ConfigError("unknown init mode '" + a.init + "'");
  RunTrace trace;
  if (a.algo == "dsa") {
    if (a.timeout_ms || a.sim_timeout) throw ConfigError("dsa supports --iters only");
    DsaOptions opt;
    opt.p = a.dsa_p;
    opt.iterations = a.iters.value_or(100);
    opt.seed = seed;
    opt.clock = clock;
    opt.init = init;
    trace = dsa_b(inst, opt).trace;
  } else {
    std::unique_ptr<RepairAlgorithm> repair;
    if (a.algo == "tdbr") {
      repair = std::make_unique<TdbrRepair>();
    } else if (a.algo == "dpop-dbr") {
      DpopLimits limits;
      limits.width_cap = a.width_cap;
      repair = std::make_unique<DpopDbrRepair>(limits);
    } else {
      throw ConfigError("unknown algorithm '" + a.algo + "'");
    }
    auto destroy = make_destroy(a.destroy, a.p_destroy, seed);
    TerminationRule term;
    term.max_iterations = a.iters;
    term.wall_timeout_ms = a.timeout_ms;
    term.simulated_timeout = a.sim_timeout;
    if (!a.iters && !a.timeout_ms && !a.sim_timeout) term.max_iterations = 100;
    RunOptions opt;
    opt.init = init;
    opt.seed = seed;
    opt.clock = clock;
    trace = run(inst, *repair, *destroy, term, opt).trace;
  }

  if (!a.trace.empty()) {
    std::ofstream out(a.trace);
    if (!out) throw ConfigError("cannot write " + a.trace);
    write_csv(out, trace);
  }
  nlohmann::json s = summarize(trace);
  if (!a.summary.empty()) write_text(a.summary, s.dump(2) + "\n");
  std::cout << s.dump() << '\n';
  return 0;
}

int run_normalize(const NormalizeArgs& a) {
  std::vector<RunTrace> pool;
  for (const auto& path : a.traces) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trace " + path);
    pool.push_back(read_csv(in, path));
  }
  NormalizedSeries s = normalize_quality(pool, a.buckets);
  std::vector<nlohmann::json> summaries;
  for (const auto& t : pool) summaries.push_back(summarize(t));
  add_quality_ratios(summaries, pool);

  auto series = [](const std::vector<std::optional<double>>& xs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& x : xs) j.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
    return j;
  };
  nlohmann::json out;
  out["bucket_times"] = s.bucket_times;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    nlohmann::json entry = summaries[i];
    entry["trace"] = a.traces[i];
    entry["lb"] = series(s.lb[i]);
    entry["ub"] = series(s.ub[i]);
    out["algorithms"].push_back(entry);
  }
  if (a.out.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_text(a.out, out.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D-LNS distributed constraint optimization benchmark driver"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Random seed (falls back to $DLNS_SEED, then 0)");

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "Generate a benchmark instance");
  gen->add_option("--family", g.family, "random | scale-free | grid | meeting")
      ->check(CLI::IsMember({"random", "scale-free", "grid", "meeting"}));
  gen->add_option("--n", g.n, "Number of agents (random, scale-free)");
  gen->add_option("--p1", g.p1, "Edge density of random networks");
  gen->add_option("--d", g.d, "Domain size");
  gen->add_option("--cost-max", g.cost_max, "Largest utility value");
  gen->add_option("--rows", g.rows, "Grid rows");
  gen->add_option("--cols", g.cols, "Grid columns");
  gen->add_option("--meetings", g.meetings, "Number of meetings");
  gen->add_option("--out", g.out, "Output file (stdout when omitted)");
  gen->add_option("--seed", seed, "Random seed");

  SolveArgs s;
  auto* solve = app.add_subcommand("solve", "Run an algorithm on an instance");
  solve->add_option("--algo", s.algo, "tdbr | dpop-dbr | dsa | exact")
      ->check(CLI::IsMember({"tdbr", "dpop-dbr", "dsa", "exact"}));
  solve->add_option("--in", s.in, "Instance file")->required();
  solve->add_option("--destroy", s.destroy, "random | dk")->check(CLI::IsMember({"random", "dk"}));
  solve->add_option("--p-destroy", s.p_destroy, "Destroy probability for random destroy")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--iters", s.iters, "Iteration limit (DSA rounds for dsa)");
  solve->add_option("--timeout-ms", s.timeout_ms, "Wall-clock limit in milliseconds");
  solve->add_option("--sim-timeout", s.sim_timeout, "Simulated-time limit");
  solve->add_option("--t-msg", s.t_msg, "Simulated latency of one message hop");
  solve->add_option("--t-cc", s.t_cc, "Simulated cost of one constraint check");
  solve->add_option("--width-cap", s.width_cap, "Largest separator DPOP-DBR accepts");
  solve->add_option("--init", s.init, "random | greedy")->check(CLI::IsMember({"random", "greedy"}));
  solve->add_option("--dsa-p", s.dsa_p, "DSA move probability")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--trace", s.trace, "Per-iteration CSV trace");
  solve->add_option("--summary", s.summary, "Summary JSON");
  solve->add_option("--seed", seed, "Random seed");

  NormalizeArgs nz;
  auto* norm = app.add_subcommand("normalize", "Normalize best-bound traces across a pool of algorithms");
  norm->add_option("traces", nz.traces, "Trace CSV files")->required();
  norm->add_option("--buckets", nz.buckets, "Number of log-spaced time buckets");
  norm->add_option("--out", nz.out, "Output JSON (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(g, resolve_seed(seed));
    if (solve->parsed()) return run_solve(s, resolve_seed(seed));
    return run_normalize(nz);
  } catch (const RunError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
