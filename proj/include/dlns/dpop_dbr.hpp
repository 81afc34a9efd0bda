#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dlns/dbr.hpp"
#include "dlns/errors.hpp"
#include "dlns/graph.hpp"
#include "dlns/instance.hpp"
#include "dlns/sim.hpp"

namespace dlns {

// Separator of every node: ancestors it or a descendant shares a function
// with, ordered from the root down. Nodes outside the tree get an empty list.
inline std::vector<std::vector<VarIndex>> separators(const PseudoTree& tree) {
  std::vector<std::vector<VarIndex>> sep(tree.universe());
  for (VarIndex v : tree.post_order()) {
    const TreeNode& node = tree.node(v);
    std::vector<VarIndex> s;
    if (node.parent) s.push_back(*node.parent);
    s.insert(s.end(), node.pseudo_parents.begin(), node.pseudo_parents.end());
    for (VarIndex c : node.children) {
      for (VarIndex u : sep[c]) {
        if (u != v) s.push_back(u);
      }
    }
    std::sort(s.begin(), s.end(), [&](VarIndex a, VarIndex b) { return tree.node(a).depth < tree.node(b).depth; });
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sep[v] = std::move(s);
  }
  return sep;
}

struct DpopLimits {
  std::size_t width_cap = 12;
  std::uint64_t max_table_bytes = std::uint64_t{1} << 30;
};

struct DpopResult {
  Assignment check;
  Assignment hat;
  Utility f_check = 0.0;  // optimum of the lower-bound relaxation over LN^k
  Utility f_tilde = 0.0;  // optimum of the upper-bound relaxation (F~)
  std::size_t max_separator = 0;
  Metrics metrics;
};

namespace detail {

// One node's joint tables over (separator assignment, own value), own value fastest.
struct DpopTable {
  std::vector<VarIndex> sep;
  std::vector<std::size_t> radix;
  std::size_t own_size = 0;
  std::vector<Utility> check;
  std::vector<Utility> hat;
};

inline std::uint64_t checked_entries(const Instance& inst, VarIndex v, const std::vector<VarIndex>& sep,
                                     const DpopLimits& limits) {
  // Entries of the joint table including v; overflow-safe against the byte cap.
  const std::uint64_t cap = limits.max_table_bytes / (2 * sizeof(Utility));
  std::uint64_t entries = inst.domain_size(v);
  for (VarIndex u : sep) {
    std::uint64_t d = inst.domain_size(u);
    if (entries > cap / d) {
      throw CapacityError("UTIL table of variable " + std::to_string(inst.variable(v).id) + " with separator size " +
                          std::to_string(sep.size()) + " exceeds the memory guard of " +
                          std::to_string(limits.max_table_bytes) + " bytes");
    }
    entries *= d;
  }
  return entries;
}

}  // namespace detail

/// Solves both relaxed problems exactly over every edge of G^k by DPOP
/// bucket elimination along `tree`. Throws CapacityError before allocating
/// when a separator is wider than the cap or a table exceeds the memory guard.
inline DpopResult solve_relaxed_exact(Network& net, const Instance& inst, const PseudoTree& tree,
                                      const Assignment& prev_check, const Assignment& prev_hat,
                                      const DpopLimits& limits = {}) {
  const std::size_t n = inst.num_variables();
  auto sep = separators(tree);
  DpopResult out;
  for (VarIndex v : tree.order()) {
    if (sep[v].size() > limits.width_cap) {
      throw CapacityError("separator of variable " + std::to_string(inst.variable(v).id) + " has size " +
                          std::to_string(sep[v].size()) + ", above the width cap " +
                          std::to_string(limits.width_cap));
    }
    out.max_separator = std::max(out.max_separator, sep[v].size());
  }
  for (VarIndex v : tree.order()) detail::checked_entries(inst, v, sep[v], limits);

  std::vector<detail::DpopTable> tables(n);
  std::vector<std::map<VarIndex, UtilPayload>> received(n);

  out.metrics = net.run_phase([&](AgentContext& ctx) {
    VarIndex v = ctx.self();
    if (!tree.contains(v)) return;
    for (const auto& msg : ctx.inbox()) received[v][msg.sender()] = msg.as<UtilPayload>();
    const TreeNode& node = tree.node(v);
    detail::DpopTable& t = tables[v];
    if (!t.check.empty() || received[v].size() < node.children.size()) return;

    t.sep = sep[v];
    t.own_size = inst.domain_size(v);
    for (VarIndex u : t.sep) t.radix.push_back(inst.domain_size(u));
    std::size_t rows = 1;
    for (auto r : t.radix) rows *= r;
    t.check.assign(rows * t.own_size, 0.0);
    t.hat.assign(rows * t.own_size, 0.0);

    auto position = [&](VarIndex u) {
      return static_cast<std::size_t>(std::find(t.sep.begin(), t.sep.end(), u) - t.sep.begin());
    };
    std::vector<std::pair<const BinaryFunction*, std::size_t>> relaxed;  // to P and PP, with sep slot
    if (node.parent) relaxed.emplace_back(&inst.function(*inst.function_between(v, *node.parent)), position(*node.parent));
    for (VarIndex pp : node.pseudo_parents) relaxed.emplace_back(&inst.function(*inst.function_between(v, pp)), position(pp));
    std::vector<std::pair<const BinaryFunction*, std::size_t>> preserved;
    for (FuncIndex f : inst.incident(v)) {
      VarIndex u = inst.function(f).other(v);
      if (!tree.contains(u)) preserved.emplace_back(&inst.function(f), prev_check.at(u));
    }
    // Child separator slots; own variable is marked with sep.size().
    std::vector<std::vector<std::size_t>> child_slots;
    std::vector<const UtilPayload*> child_util;
    for (VarIndex c : node.children) {
      std::vector<std::size_t> slots;
      for (VarIndex u : sep[c]) slots.push_back(u == v ? t.sep.size() : position(u));
      child_slots.push_back(std::move(slots));
      child_util.push_back(&received[v].at(c));
    }

    std::vector<std::size_t> s(t.sep.size(), 0);
    std::uint64_t checks = 0;
    for (std::size_t row = 0; row < rows; ++row) {
      for (std::size_t own = 0; own < t.own_size; ++own) {
        Utility c = 0.0;
        Utility h = 0.0;
        for (const auto& [fn, slot] : relaxed) {
          Utility u = fn->at_from(v, own, s[slot]);
          c += u;
          h += u;
          ++checks;
        }
        for (std::size_t ci = 0; ci < child_slots.size(); ++ci) {
          std::size_t idx = 0;
          for (std::size_t slot : child_slots[ci]) {
            std::size_t value = slot == t.sep.size() ? own : s[slot];
            std::size_t radix = slot == t.sep.size() ? t.own_size : t.radix[slot];
            idx = idx * radix + value;
          }
          c += child_util[ci]->check[idx];
          h += child_util[ci]->hat[idx];
        }
        for (const auto& [fn, value] : preserved) {
          c += fn->at_from(v, own, value);
          ++checks;
        }
        t.check[row * t.own_size + own] = c;
        t.hat[row * t.own_size + own] = h;
      }
      for (std::size_t i = s.size(); i-- > 0;) {
        if (++s[i] < t.radix[i]) break;
        s[i] = 0;
      }
    }
    ctx.count_checks(checks);

    UtilPayload projected;
    projected.check.assign(rows, kNegInf);
    projected.hat.assign(rows, kNegInf);
    for (std::size_t row = 0; row < rows; ++row) {
      for (std::size_t own = 0; own < t.own_size; ++own) {
        projected.check[row] = max(projected.check[row], t.check[row * t.own_size + own]);
        projected.hat[row] = max(projected.hat[row], t.hat[row * t.own_size + own]);
      }
    }
    if (node.parent) {
      ctx.send(*node.parent, std::move(projected));
    } else {
      out.f_check += projected.check[0];
      out.f_tilde += projected.hat[0];
    }
  });

  out.check = prev_check;
  out.hat = prev_hat;
  std::vector<bool> chosen(n, false);
  std::vector<std::map<VarIndex, ValueEntry>> known(n);
  Metrics values = net.run_phase([&](AgentContext& ctx) {
    VarIndex v = ctx.self();
    for (const auto& msg : ctx.inbox()) {
      for (const auto& e : msg.as<ValuePayload>().entries) known[v][e.var] = e;
    }
    if (!tree.contains(v) || chosen[v]) return;
    const TreeNode& node = tree.node(v);
    if (node.parent) {
      bool heard = false;
      for (const auto& msg : ctx.inbox()) heard = heard || msg.sender() == *node.parent;
      if (!heard) return;
    } else if (!ctx.first_round()) {
      return;
    }
    const detail::DpopTable& t = tables[v];
    std::size_t row_check = 0;
    std::size_t row_hat = 0;
    for (std::size_t i = 0; i < t.sep.size(); ++i) {
      const ValueEntry& e = known[v].at(t.sep[i]);
      row_check = row_check * t.radix[i] + static_cast<std::size_t>(e.check);
      row_hat = row_hat * t.radix[i] + static_cast<std::size_t>(e.hat);
    }
    auto x_check = argmax_lowest(t.own_size, [&](std::size_t own) { return t.check[row_check * t.own_size + own]; });
    auto x_hat = argmax_lowest(t.own_size, [&](std::size_t own) { return t.hat[row_hat * t.own_size + own]; });
    out.check.set_index(v, static_cast<int>(x_check));
    out.hat.set_index(v, static_cast<int>(x_hat));
    chosen[v] = true;

    ValueEntry mine{v, static_cast<int>(x_check), static_cast<int>(x_hat)};
    for (VarIndex u : inst.neighbors_of(v)) {
      bool tree_child = std::find(node.children.begin(), node.children.end(), u) != node.children.end();
      if (!tree_child) {
        ctx.send(u, ValuePayload{{mine}});
        continue;
      }
      ValuePayload p;
      for (VarIndex w : sep[u]) {
        p.entries.push_back(w == v ? mine : known[v].at(w));
      }
      ctx.send(u, std::move(p));
    }
  });
  out.metrics += values;
  return out;
}

/// DPOP-based bounded repair: the relaxation keeps every edge among the
/// destroyed variables, so the relaxation edges that share F~ are all of E^k.
class DpopDbrRepair : public DbrRepair {
public:
  explicit DpopDbrRepair(DpopLimits limits = {}) : limits_(limits) {}

  std::string name() const override { return "dpop-dbr"; }
  const DpopLimits& limits() const noexcept { return limits_; }

protected:
  RepairOutcome solve(const Relaxation& rel, const RepairInput& in) override {
    DpopResult r = solve_relaxed_exact(*net_, *inst_, rel.tree, in.prev_check, in.prev_hat, limits_);
    RepairOutcome out;
    out.check = std::move(r.check);
    out.hat = std::move(r.hat);
    out.f_tilde = r.f_tilde;
    for (const Edge& e : rel.graph.edges()) out.relaxation_edges.push_back(e.function);
    std::sort(out.relaxation_edges.begin(), out.relaxation_edges.end());
    out.metrics = std::move(r.metrics);
    return out;
  }

private:
  DpopLimits limits_;
};

}  // namespace dlns
