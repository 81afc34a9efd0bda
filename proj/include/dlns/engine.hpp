#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dlns/dbr.hpp"
#include "dlns/destroy.hpp"
#include "dlns/errors.hpp"
#include "dlns/instance.hpp"
#include "dlns/sim.hpp"
#include "dlns/trace.hpp"

namespace dlns {

struct TerminationRule {
  std::optional<std::size_t> max_iterations;
  std::optional<double> wall_timeout_ms;
  std::optional<double> simulated_timeout;
  std::optional<double> gap_threshold;  // stop once (best_ub - best_lb) <= gap * best_ub

  void validate() const {
    if (!max_iterations && !wall_timeout_ms && !simulated_timeout && !gap_threshold) {
      throw ConfigError("termination rule needs at least one criterion");
    }
  }
};

struct IterationState {
  std::size_t k = 0;
  Assignment x_check;
  Assignment x_hat;
  Utility best_lb = kNegInf;
  std::optional<Utility> best_ub;
  Assignment best_solution;
  Utility best_utility = kNegInf;
};

enum class InitMode { random, greedy_domain };

inline Assignment initialize_values(const Instance& inst, InitMode mode, std::uint64_t seed) {
  Assignment a(inst.num_variables());
  if (mode == InitMode::random) {
    std::mt19937_64 rng(seed);
    for (VarIndex v = 0; v < inst.num_variables(); ++v) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(inst.domain_size(v)) - 1);
      a.set_index(v, pick(rng));
    }
    return a;
  }
  // Greedy: each variable in turn takes the value that is best against the
  // variables already set, preferring values that violate nothing.
  for (VarIndex v = 0; v < inst.num_variables(); ++v) {
    std::size_t best = 0;
    Utility best_u = kNegInf;
    for (std::size_t x = 0; x < inst.domain_size(v); ++x) {
      Utility u = 0.0;
      for (FuncIndex f : inst.incident(v)) {
        VarIndex w = inst.function(f).other(v);
        if (a.bound(w)) u += inst.function(f).at_from(v, x, a.at(w));
      }
      if (x == 0 || u > best_u) {
        best_u = u;
        best = x;
      }
    }
    a.set_index(v, static_cast<int>(best));
  }
  return a;
}

// Keeps the candidate unless it violates a hard constraint.
inline const Assignment& accept(const Assignment& candidate, const Assignment& previous, const Instance& inst) {
  return evaluate_total(inst, candidate).is_finite() ? candidate : previous;
}

struct RunOptions {
  InitMode init = InitMode::random;
  std::uint64_t seed = 0;
  ClockConfig clock{};
  std::optional<Assignment> initial_assignment;  // replaces value initialization
};

struct IterationRecord {
  std::size_t destroyed = 0;
  bool accepted = false;          // candidate replaced the current solution
  Utility current_utility = 0.0;  // F of the solution held after the iteration
};

struct RunResult {
  RunTrace trace;
  IterationState state;
  std::vector<Metrics> metrics;  // per row of the trace
  std::vector<IterationRecord> records;
  std::optional<std::size_t> first_feasible;  // first k whose held solution is feasible
};

namespace detail {

inline TraceRow make_row(std::size_t k, const Metrics& m, double sim_time, double wall_ms, Utility lb, Utility ub,
                         const IterationState& s) {
  TraceRow r;
  r.k = k;
  r.sim_time = sim_time;
  r.wall_ms = wall_ms;
  r.lb = lb;
  r.ub = ub;
  r.best_lb = s.best_lb;
  r.best_ub = s.best_ub;
  r.rho = approximation_ratio(s.best_lb, s.best_ub);
  r.msgs = m.messages();
  r.payload = m.total_payload;
  r.max_payload = m.max_payload;
  r.ccs = m.constraint_checks();
  return r;
}

}  // namespace detail

/// D-LNS: value initialization, then destroy, repair and accept until the
/// termination rule fires. Best bounds are running extrema of the
/// per-iteration bounds; the best solution is the best feasible one held.
inline RunResult run(const Instance& inst, RepairAlgorithm& repair, DestroyStrategy& destroy,
                     const TerminationRule& term, const RunOptions& opt = {}) {
  term.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(clock::now() - start).count(); };

  RunResult res;
  res.trace.algorithm = repair.name();
  IterationState& s = res.state;
  s.x_check = opt.initial_assignment ? *opt.initial_assignment : initialize_values(inst, opt.init, opt.seed);
  check_shape(inst, s.x_check);
  if (!s.x_check.complete()) throw ConfigError("initial assignment must bind every variable");
  s.x_hat = s.x_check;

  repair.reset(inst, opt.clock, opt.seed);
  RepairOutcome init = repair.initialize(s.x_check);
  s.best_lb = init.lb;
  s.best_ub = init.ub;
  s.best_solution = s.x_check;
  s.best_utility = init.lb;
  double sim_time = init.metrics.simulated_time;
  res.metrics.push_back(init.metrics);
  res.trace.rows.push_back(detail::make_row(0, init.metrics, sim_time, elapsed_ms(), init.lb, init.ub, s));
  res.records.push_back({0, true, init.lb});
  if (init.lb.is_finite()) res.first_feasible = 0;

  Utility lb = init.lb;
  Utility ub = init.ub;
  auto done = [&] {
    if (term.max_iterations && s.k >= *term.max_iterations) return true;
    if (term.wall_timeout_ms && elapsed_ms() >= *term.wall_timeout_ms) return true;
    if (term.simulated_timeout && sim_time >= *term.simulated_timeout) return true;
    if (term.gap_threshold && s.best_lb.is_finite() && s.best_ub &&
        s.best_ub->value() - s.best_lb.value() <= *term.gap_threshold * s.best_ub->value()) {
      return true;
    }
    return false;
  };

  while (!done()) {
    ++s.k;
    DestroyFlags flags = destroy.destroy(inst, s.x_check, s.k);
    if (flags.size() != inst.num_variables()) throw StrategyError("destroy produced a flag count unequal to the agents");
    IterationRecord rec;
    for (auto f : flags) rec.destroyed += f == DestroyFlag::destroyed;
    Metrics m;
    if (rec.destroyed > 0) {
      RepairOutcome out;
      try {
        out = repair.repair(RepairInput{flags, s.x_check, s.x_hat, s.k});
      } catch (const CapacityError& e) {
        throw RunError(s.k, e.what());
      }
      lb = out.lb;
      ub = out.ub;
      m = out.metrics;
      if (&accept(out.check, s.x_check, inst) == &out.check) {
        s.x_check = std::move(out.check);
        s.x_hat = std::move(out.hat);
        rec.accepted = true;
      }
    }
    s.best_lb = max(s.best_lb, lb);
    if (s.best_ub && ub < *s.best_ub) s.best_ub = ub;
    rec.current_utility = evaluate_total(inst, s.x_check);
    if (rec.current_utility > s.best_utility) {
      s.best_utility = rec.current_utility;
      s.best_solution = s.x_check;
    }
    if (!res.first_feasible && rec.current_utility.is_finite()) res.first_feasible = s.k;
    sim_time += m.simulated_time;
    res.metrics.push_back(m);
    res.records.push_back(rec);
    res.trace.rows.push_back(detail::make_row(s.k, m, sim_time, elapsed_ms(), lb, ub, s));
  }
  return res;
}

}  // namespace dlns
