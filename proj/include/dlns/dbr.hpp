#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlns/errors.hpp"
#include "dlns/graph.hpp"
#include "dlns/instance.hpp"
#include "dlns/sim.hpp"
#include "dlns/utility.hpp"

namespace dlns {

enum class DestroyFlag : std::uint8_t { preserved, destroyed };

using DestroyFlags = std::vector<DestroyFlag>;

inline std::vector<bool> large_neighborhood(const DestroyFlags& flags) {
  std::vector<bool> ln(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) ln[i] = flags[i] == DestroyFlag::destroyed;
  return ln;
}

/// Per-function upper-bound surrogate f-hat.
///
/// A function never used as a relaxation edge reads as its largest table
/// entry. Once optimized, it holds the largest mean share F~/|E~| of any
/// iteration it took part in, and keeps that value in iterations where it is
/// not a relaxation edge.
class FHatCache {
public:
  FHatCache() = default;
  explicit FHatCache(const Instance& inst) : inst_(&inst), stored_(inst.num_functions()), optimized_(inst.num_functions(), false) {}

  Utility value(FuncIndex f) const { return optimized_.at(f) ? stored_[f] : inst_->function(f).max_entry(); }
  bool ever_optimized(FuncIndex f) const { return optimized_.at(f); }
  std::size_t size() const noexcept { return stored_.size(); }

  // Sum of value(f) over all functions.
  Utility total() const {
    Utility t = 0.0;
    for (FuncIndex f = 0; f < stored_.size(); ++f) t += value(f);
    return t;
  }

  // Relaxation edges of the current iteration take max(F~ / |E~|, their
  // previous optimized value). No-op when there are no relaxation edges.
  void update(std::span<const FuncIndex> relaxation_edges, Utility f_tilde) {
    if (relaxation_edges.empty()) return;
    Utility share = f_tilde / relaxation_edges.size();
    for (FuncIndex f : relaxation_edges) {
      stored_.at(f) = optimized_[f] ? max(stored_[f], share) : share;
      optimized_[f] = true;
    }
  }

private:
  const Instance* inst_ = nullptr;
  std::vector<Utility> stored_;
  std::vector<bool> optimized_;
};

struct BoundsResult {
  Utility lb = 0.0;
  Utility ub = 0.0;
  Metrics metrics;
  // How many times each function entered the LB and UB sums.
  std::vector<unsigned> lb_uses;
  std::vector<unsigned> ub_uses;
};

/// BOUNDS phase over the global pseudo-tree. Each agent adds the functions to
/// its parent and pseudo-parents to its children's partial sums and forwards
/// the pair upwards; the forest's root totals are (F(check), sum of f-hat).
inline BoundsResult bound_propagation(Network& net, const Instance& inst, const PseudoTree& global_tree,
                                      const Assignment& check, const Assignment& hat, const FHatCache& cache) {
  (void)hat;  // f-hat is constant over its arguments once defined
  const std::size_t n = inst.num_variables();
  BoundsResult out;
  out.lb_uses.assign(inst.num_functions(), 0);
  out.ub_uses.assign(inst.num_functions(), 0);
  std::vector<Utility> acc_lb(n, 0.0);
  std::vector<Utility> acc_ub(n, 0.0);
  std::vector<std::size_t> pending(n, 0);
  std::vector<bool> done(n, false);
  for (VarIndex v = 0; v < n; ++v) pending[v] = global_tree.node(v).children.size();

  out.metrics = net.run_phase([&](AgentContext& ctx) {
    VarIndex v = ctx.self();
    for (const auto& msg : ctx.inbox()) {
      const auto& b = msg.as<BoundsPayload>();
      acc_lb[v] += b.lb;
      acc_ub[v] += b.ub;
      --pending[v];
    }
    if (done[v] || pending[v] > 0) return;
    done[v] = true;
    const TreeNode& node = global_tree.node(v);
    std::uint64_t checks = 0;
    auto add = [&](VarIndex other) {
      FuncIndex f = *inst.function_between(v, other);
      acc_lb[v] += inst.function(f).at_from(v, check.at(v), check.at(other));
      acc_ub[v] += cache.value(f);
      ++out.lb_uses[f];
      ++out.ub_uses[f];
      ++checks;
    };
    if (node.parent) add(*node.parent);
    for (VarIndex pp : node.pseudo_parents) add(pp);
    ctx.count_checks(checks);
    if (node.parent) {
      ctx.send(*node.parent, BoundsPayload{acc_lb[v], acc_ub[v]});
    } else {
      out.lb += acc_lb[v];
      out.ub += acc_ub[v];
    }
  });
  return out;
}

struct Relaxation {
  ConstraintGraph graph;  // G^k: destroyed variables and the edges among them
  PseudoTree tree;        // T^k over G^k
};

/// G^k and a DFS pseudo-tree over it that favours edges used least often in
/// earlier relaxation trees.
inline Relaxation relaxation(const DestroyFlags& flags, const ConstraintGraph& global, const EdgeUsage& usage,
                             std::uint64_t seed = 0) {
  if (flags.size() != global.universe()) throw StructuralError("destroy flags must cover every agent");
  Relaxation r;
  r.graph = induced_subgraph(global, large_neighborhood(flags));
  r.tree = dfs_pseudo_tree(r.graph, usage, seed);
  return r;
}

struct RepairInput {
  const DestroyFlags& flags;
  const Assignment& prev_check;  // accepted solution of the previous iteration
  const Assignment& prev_hat;
  std::size_t iteration = 0;
};

struct RepairOutcome {
  Assignment check;  // candidate x-check^k, preserved variables extended
  Assignment hat;    // x-hat^k, preserved variables extended
  Utility lb = 0.0;
  Utility ub = 0.0;
  Utility f_tilde = 0.0;
  std::vector<FuncIndex> relaxation_edges;
  std::size_t relaxation_roots = 0;
  Metrics metrics;
  BoundsResult bounds;
};

/// Repair phase of D-LNS.
class RepairAlgorithm {
public:
  virtual ~RepairAlgorithm() = default;
  virtual std::string name() const = 0;
  // Prepares for a run on `inst`; drops all state from earlier runs.
  virtual void reset(const Instance& inst, const ClockConfig& clock, std::uint64_t seed) = 0;
  // Bounds of the initial assignment (k = 0).
  virtual RepairOutcome initialize(const Assignment& initial) = 0;
  virtual RepairOutcome repair(const RepairInput& in) = 0;
};

/// Relaxation and bounding phases shared by T-DBR and DPOP-DBR; subclasses
/// provide the solving phase.
class DbrRepair : public RepairAlgorithm {
public:
  // Overrides the relaxation tree of selected iterations with a fixed set of
  // tree edges (function ids). Returning nullopt keeps the DFS tree.
  using TreeScript = std::function<std::optional<std::vector<int>>(std::size_t iteration)>;

  void set_tree_script(TreeScript script) { tree_script_ = std::move(script); }

  void reset(const Instance& inst, const ClockConfig& clock, std::uint64_t seed) override {
    inst_ = &inst;
    seed_ = seed;
    global_graph_ = build_graph(inst);
    global_tree_ = dfs_pseudo_tree(global_graph_, {}, seed);
    cache_ = FHatCache(inst);
    usage_ = EdgeUsage{};
    net_ = std::make_unique<Network>(inst.num_variables(), clock);
  }

  RepairOutcome initialize(const Assignment& initial) override {
    RepairOutcome out;
    out.check = initial;
    out.hat = initial;
    out.bounds = bound_propagation(*net_, *inst_, global_tree_, out.check, out.hat, cache_);
    out.lb = out.bounds.lb;
    out.ub = out.bounds.ub;
    out.metrics = out.bounds.metrics;
    return out;
  }

  RepairOutcome repair(const RepairInput& in) override {
    Relaxation rel;
    rel.graph = induced_subgraph(global_graph_, large_neighborhood(in.flags));
    std::optional<std::vector<int>> scripted = tree_script_ ? tree_script_(in.iteration) : std::nullopt;
    rel.tree = scripted ? pseudo_tree_from_edges(rel.graph, *scripted)
                        : dfs_pseudo_tree(rel.graph, usage_, seed_ + in.iteration);
    usage_.record(rel.tree.tree_edge_ids());

    RepairOutcome out = solve(rel, in);
    out.relaxation_roots = rel.tree.roots().size();
    cache_.update(out.relaxation_edges, out.f_tilde);
    out.bounds = bound_propagation(*net_, *inst_, global_tree_, out.check, out.hat, cache_);
    out.lb = out.bounds.lb;
    out.ub = out.bounds.ub;
    out.metrics += out.bounds.metrics;
    return out;
  }

  const Instance& instance() const { return *inst_; }
  const ConstraintGraph& global_graph() const noexcept { return global_graph_; }
  const PseudoTree& global_tree() const noexcept { return global_tree_; }
  const FHatCache& cache() const noexcept { return cache_; }
  const EdgeUsage& usage() const noexcept { return usage_; }
  Network& network() { return *net_; }

protected:
  // Solving phase: fills check/hat (extended to all variables), f_tilde,
  // relaxation_edges and the phase metrics.
  virtual RepairOutcome solve(const Relaxation& rel, const RepairInput& in) = 0;

  const Instance* inst_ = nullptr;
  std::unique_ptr<Network> net_;

private:
  std::uint64_t seed_ = 0;
  ConstraintGraph global_graph_;
  PseudoTree global_tree_;
  FHatCache cache_;
  EdgeUsage usage_;
  TreeScript tree_script_;
};

// Preserved variables keep their previous values.
inline void extend_preserved(const DestroyFlags& flags, const Assignment& prev, Assignment& out) {
  for (VarIndex v = 0; v < flags.size(); ++v) {
    if (flags[v] == DestroyFlag::preserved) out.set_index(v, prev.index(v));
  }
}

// Lowest index among the maxima of `column(i)` for i in [0, n).
template <class Column>
std::size_t argmax_lowest(std::size_t n, Column&& column) {
  std::size_t best = 0;
  Utility best_u = column(0);
  for (std::size_t i = 1; i < n; ++i) {
    Utility u = column(i);
    if (u > best_u) {
      best_u = u;
      best = i;
    }
  }
  return best;
}

}  // namespace dlns
