#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlns/dbr.hpp"
#include "dlns/graph.hpp"
#include "dlns/instance.hpp"
#include "dlns/sim.hpp"

namespace dlns {

/// UTIL tables of one agent for both relaxed problems.
///
/// u_check / u_hat are indexed [own value][parent value] (a single parent
/// column for roots); projected_* hold the max over own values per parent value.
struct UtilPair {
  std::size_t own_size = 0;
  std::size_t parent_size = 1;
  std::vector<Utility> u_check;
  std::vector<Utility> u_hat;
  std::vector<Utility> projected_check;
  std::vector<Utility> projected_hat;

  Utility check_at(std::size_t own, std::size_t parent) const { return u_check[own * parent_size + parent]; }
  Utility hat_at(std::size_t own, std::size_t parent) const { return u_hat[own * parent_size + parent]; }
};

// Values an agent believes its neighbours hold, per relaxed problem.
struct Context {
  std::map<VarIndex, int> check;
  std::map<VarIndex, int> hat;
};

struct UtilResult {
  std::vector<std::optional<UtilPair>> tables;  // engaged for destroyed agents
  Metrics metrics;
};

/// Leaf-to-root UTIL pass over the relaxation tree.
///
/// The lower-bound table adds the tree edge to the parent, the children's
/// projections and every function to a preserved neighbour at its previous
/// value; the upper-bound table keeps only tree edges and the children's
/// projections. Back edges among destroyed variables are ignored.
inline UtilResult util_propagation(Network& net, const Instance& inst, const PseudoTree& tree,
                                   const Assignment& prev_check) {
  const std::size_t n = inst.num_variables();
  UtilResult out;
  out.tables.resize(n);
  std::vector<std::map<VarIndex, UtilPayload>> received(n);

  out.metrics = net.run_phase([&](AgentContext& ctx) {
    VarIndex v = ctx.self();
    if (!tree.contains(v)) return;
    for (const auto& msg : ctx.inbox()) received[v][msg.sender()] = msg.as<UtilPayload>();
    const TreeNode& node = tree.node(v);
    if (out.tables[v] || received[v].size() < node.children.size()) return;

    std::vector<std::pair<const BinaryFunction*, std::size_t>> preserved;
    for (FuncIndex f : inst.incident(v)) {
      VarIndex u = inst.function(f).other(v);
      if (!tree.contains(u)) preserved.emplace_back(&inst.function(f), prev_check.at(u));
    }
    const BinaryFunction* to_parent = node.parent_function ? &inst.function(*node.parent_function) : nullptr;

    UtilPair t;
    t.own_size = inst.domain_size(v);
    t.parent_size = node.parent ? inst.domain_size(*node.parent) : 1;
    t.u_check.resize(t.own_size * t.parent_size);
    t.u_hat.resize(t.own_size * t.parent_size);
    std::uint64_t checks = 0;
    for (std::size_t own = 0; own < t.own_size; ++own) {
      Utility from_children_check = 0.0;
      Utility from_children_hat = 0.0;
      for (const auto& [child, util] : received[v]) {
        from_children_check += util.check[own];
        from_children_hat += util.hat[own];
      }
      for (std::size_t par = 0; par < t.parent_size; ++par) {
        Utility edge = 0.0;
        if (to_parent) {
          edge = to_parent->at_from(v, own, par);
          ++checks;
        }
        Utility c = edge + from_children_check;
        for (const auto& [fn, value] : preserved) {
          c += fn->at_from(v, own, value);
          ++checks;
        }
        t.u_check[own * t.parent_size + par] = c;
        t.u_hat[own * t.parent_size + par] = edge + from_children_hat;
      }
    }
    t.projected_check.assign(t.parent_size, kNegInf);
    t.projected_hat.assign(t.parent_size, kNegInf);
    for (std::size_t own = 0; own < t.own_size; ++own) {
      for (std::size_t par = 0; par < t.parent_size; ++par) {
        t.projected_check[par] = max(t.projected_check[par], t.check_at(own, par));
        t.projected_hat[par] = max(t.projected_hat[par], t.hat_at(own, par));
      }
    }
    ctx.count_checks(checks);
    if (node.parent) ctx.send(*node.parent, UtilPayload{t.projected_check, t.projected_hat});
    out.tables[v] = std::move(t);
  });
  return out;
}

// Sum over the relaxation forest's roots of the optimal upper-bound-side utility (F~).
inline Utility relaxed_optimum_hat(const PseudoTree& tree, const UtilResult& utils) {
  Utility total = 0.0;
  for (VarIndex r : tree.roots()) total += utils.tables[r]->projected_hat[0];
  return total;
}

// Same for the lower-bound-side problem: the optimum of its objective over LN^k.
inline Utility relaxed_optimum_check(const PseudoTree& tree, const UtilResult& utils) {
  Utility total = 0.0;
  for (VarIndex r : tree.roots()) total += utils.tables[r]->projected_check[0];
  return total;
}

struct ValueResult {
  Assignment check;  // destroyed variables chosen, preserved ones extended
  Assignment hat;
  std::vector<Context> contexts;
  Metrics metrics;
};

/// Root-to-leaf VALUE pass. Each destroyed agent picks the best row of its
/// UTIL tables given its parent's values (lowest value on ties) and sends the
/// pair to all its neighbours in the constraint graph; every agent records
/// what it hears in its contexts.
inline ValueResult value_propagation(Network& net, const Instance& inst, const PseudoTree& tree,
                                     const UtilResult& utils, const Assignment& prev_check,
                                     const Assignment& prev_hat) {
  const std::size_t n = inst.num_variables();
  ValueResult out;
  out.check = prev_check;
  out.hat = prev_hat;
  out.contexts.resize(n);
  for (VarIndex v = 0; v < n; ++v) {
    for (VarIndex u : inst.neighbors_of(v)) {
      out.contexts[v].check[u] = prev_check.index(u);
      out.contexts[v].hat[u] = prev_hat.index(u);
    }
  }
  std::vector<bool> chosen(n, false);

  out.metrics = net.run_phase([&](AgentContext& ctx) {
    VarIndex v = ctx.self();
    Context& mine = out.contexts[v];
    for (const auto& msg : ctx.inbox()) {
      for (const auto& e : msg.as<ValuePayload>().entries) {
        mine.check[e.var] = e.check;
        mine.hat[e.var] = e.hat;
      }
    }
    if (!tree.contains(v) || chosen[v]) return;
    const TreeNode& node = tree.node(v);
    std::size_t col_check = 0;
    std::size_t col_hat = 0;
    if (node.parent) {
      bool heard = false;
      for (const auto& msg : ctx.inbox()) heard = heard || msg.sender() == *node.parent;
      if (!heard) return;
      col_check = static_cast<std::size_t>(mine.check.at(*node.parent));
      col_hat = static_cast<std::size_t>(mine.hat.at(*node.parent));
    } else if (!ctx.first_round()) {
      return;
    }
    const UtilPair& t = *utils.tables[v];
    auto x_check = argmax_lowest(t.own_size, [&](std::size_t own) { return t.check_at(own, col_check); });
    auto x_hat = argmax_lowest(t.own_size, [&](std::size_t own) { return t.hat_at(own, col_hat); });
    out.check.set_index(v, static_cast<int>(x_check));
    out.hat.set_index(v, static_cast<int>(x_hat));
    chosen[v] = true;
    for (VarIndex u : inst.neighbors_of(v)) {
      ctx.send(u, ValuePayload{{ValueEntry{v, static_cast<int>(x_check), static_cast<int>(x_hat)}}});
    }
  });
  return out;
}

// Mean-share update of the cached bounds on the relaxation tree edges.
inline void fhat_update(FHatCache& cache, const PseudoTree& tree, Utility f_tilde) {
  cache.update(tree.tree_edges(), f_tilde);
}

/// Tree-based bounded repair: both relaxed problems are solved on the DFS
/// tree of the destroyed subgraph, so every UTIL message has two lists of
/// length d and every agent performs O(d^2) constraint checks.
class TdbrRepair : public DbrRepair {
public:
  std::string name() const override { return "tdbr"; }

protected:
  RepairOutcome solve(const Relaxation& rel, const RepairInput& in) override {
    RepairOutcome out;
    UtilResult utils = util_propagation(*net_, *inst_, rel.tree, in.prev_check);
    ValueResult values = value_propagation(*net_, *inst_, rel.tree, utils, in.prev_check, in.prev_hat);
    out.check = std::move(values.check);
    out.hat = std::move(values.hat);
    out.f_tilde = relaxed_optimum_hat(rel.tree, utils);
    out.relaxation_edges = rel.tree.tree_edges();
    out.metrics = utils.metrics;
    out.metrics += values.metrics;
    return out;
  }
};

}  // namespace dlns
