#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dlns/engine.hpp"
#include "dlns/errors.hpp"
#include "dlns/instance.hpp"
#include "dlns/sim.hpp"
#include "dlns/trace.hpp"

namespace dlns {

struct ExactResult {
  Assignment solution;
  Utility optimum = kNegInf;
  bool feasible = false;
  std::uint64_t visited = 0;  // complete assignments reached
};

/// Exhaustive search for x* by depth-first enumeration in variable order,
/// skipping branches that already hit a hard constraint. Lowest assignment
/// wins ties. Refuses search spaces larger than `cap` assignments.
inline ExactResult exact_solve(const Instance& inst, double cap = 1e6) {
  const std::size_t n = inst.num_variables();
  double space = 1.0;
  for (VarIndex v = 0; v < n; ++v) space *= static_cast<double>(inst.domain_size(v));
  if (space > cap) {
    throw CapacityError("exact search space of " + to_string(Utility(space)) + " assignments exceeds the cap of " +
                        to_string(Utility(cap)));
  }
  // Functions checked when their later variable is set.
  std::vector<std::vector<FuncIndex>> closing(n);
  for (FuncIndex f = 0; f < inst.num_functions(); ++f) {
    const auto& fn = inst.function(f);
    closing[std::max(fn.first(), fn.second())].push_back(f);
  }
  ExactResult res;
  res.solution = Assignment(n);
  for (VarIndex v = 0; v < n; ++v) res.solution.set_index(v, 0);
  if (n == 0) {
    res.optimum = 0.0;
    res.feasible = true;
    return res;
  }
  Assignment cur(n);
  std::vector<Utility> partial(n + 1, 0.0);
  VarIndex v = 0;
  cur.set_index(0, -1);
  while (true) {
    int next = cur.index(v) + 1;
    if (next >= static_cast<int>(inst.domain_size(v))) {
      cur.unbind(v);
      if (v == 0) break;
      --v;
      continue;
    }
    cur.set_index(v, next);
    Utility u = partial[v];
    for (FuncIndex f : closing[v]) {
      const auto& fn = inst.function(f);
      u += fn.at(cur.at(fn.first()), cur.at(fn.second()));
    }
    if (u.is_neg_inf()) continue;
    partial[v + 1] = u;
    if (v + 1 == n) {
      ++res.visited;
      if (!res.feasible || u > res.optimum) {
        res.optimum = u;
        res.solution = cur;
        res.feasible = true;
      }
      continue;
    }
    ++v;
    cur.set_index(v, -1);
  }
  return res;
}

struct DsaOptions {
  double p = 0.6;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  ClockConfig clock{};
  InitMode init = InitMode::random;
  std::optional<Assignment> initial_assignment;
};

struct DsaResult {
  RunTrace trace;
  Assignment final_assignment;
  Assignment best_solution;
  Utility best_utility = kNegInf;
  std::vector<Metrics> metrics;
  std::optional<std::size_t> first_feasible;
};

/// DSA-B. Every round each agent scores its values against its neighbours'
/// last announced values, counting violated hard constraints first and
/// utility second. It moves with probability p to a strictly better value,
/// or to an equally scored other value while it is in violation, and then
/// announces its value to all neighbours.
inline DsaResult dsa_b(const Instance& inst, const DsaOptions& opt = {}) {
  if (!(opt.p >= 0.0 && opt.p <= 1.0)) throw ConfigError("DSA probability must lie in [0, 1]");
  const std::size_t n = inst.num_variables();
  Assignment x = opt.initial_assignment ? *opt.initial_assignment : initialize_values(inst, opt.init, opt.seed);
  check_shape(inst, x);
  std::vector<std::vector<int>> ctx(n);  // ctx[v][j]: value of neighbors_of(v)[j]
  for (VarIndex v = 0; v < n; ++v) {
    for (VarIndex u : inst.neighbors_of(v)) ctx[v].push_back(x.index(u));
  }
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Network net(n, opt.clock);

  DsaResult res;
  res.trace.algorithm = "dsa";
  Utility current = evaluate_total(inst, x);
  res.best_utility = current;
  res.best_solution = x;
  if (current.is_finite()) res.first_feasible = 0;
  TraceRow row0;
  row0.lb = current;
  row0.best_lb = current;
  res.trace.rows.push_back(row0);
  res.metrics.emplace_back();
  double sim_time = 0.0;

  struct Score {
    std::size_t violations;
    Utility utility;
    bool operator<(const Score& o) const {
      if (violations != o.violations) return violations > o.violations;
      return utility < o.utility;
    }
    bool operator==(const Score& o) const { return violations == o.violations && utility == o.utility; }
  };

  for (std::size_t k = 1; k <= opt.iterations; ++k) {
    Metrics m = net.run_phase([&](AgentContext& agent) {
      VarIndex v = agent.self();
      const auto& nbrs = inst.neighbors_of(v);
      for (const auto& msg : agent.inbox()) {
        for (const auto& e : msg.as<ValuePayload>().entries) {
          auto pos = std::lower_bound(nbrs.begin(), nbrs.end(), e.var) - nbrs.begin();
          ctx[v][pos] = e.check;
        }
      }
      if (!agent.first_round()) return;
      std::vector<Score> scores(inst.domain_size(v));
      std::uint64_t checks = 0;
      for (std::size_t val = 0; val < scores.size(); ++val) {
        Score s{0, 0.0};
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
          Utility u = inst.function(*inst.function_between(v, nbrs[j])).at_from(v, val, ctx[v][j]);
          ++checks;
          if (u.is_neg_inf()) {
            ++s.violations;
          } else {
            s.utility += u;
          }
        }
        scores[val] = s;
      }
      agent.count_checks(checks);
      std::size_t own = x.at(v);
      std::size_t best = 0;
      for (std::size_t val = 1; val < scores.size(); ++val) {
        if (scores[best] < scores[val]) best = val;
      }
      std::optional<std::size_t> move;
      if (scores[own] < scores[best]) {
        move = best;
      } else if (scores[own].violations > 0) {
        for (std::size_t val = 0; val < scores.size() && !move; ++val) {
          if (val != own && scores[val] == scores[own]) move = val;
        }
      }
      if (move && coin(rng) < opt.p) x.set_index(v, static_cast<int>(*move));
      for (VarIndex u : nbrs) agent.send(u, ValuePayload{{ValueEntry{v, x.index(v), x.index(v)}}});
    });
    sim_time += m.simulated_time;
    current = evaluate_total(inst, x);
    if (current > res.best_utility) {
      res.best_utility = current;
      res.best_solution = x;
    }
    if (!res.first_feasible && current.is_finite()) res.first_feasible = k;
    TraceRow r;
    r.k = k;
    r.sim_time = sim_time;
    r.lb = current;
    r.best_lb = res.best_utility;
    r.msgs = m.messages();
    r.payload = m.total_payload;
    r.max_payload = m.max_payload;
    r.ccs = m.constraint_checks();
    res.trace.rows.push_back(r);
    res.metrics.push_back(m);
  }
  res.final_assignment = x;
  return res;
}

}  // namespace dlns
