#pragma once

// Independent reference computations for the test suites. Everything here is
// plain enumeration over the instance tables and shares no code with the
// solvers beyond the Instance accessors.

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "dlns/graph.hpp"
#include "dlns/instance.hpp"

namespace oracle {

using dlns::Assignment;
using dlns::Instance;
using dlns::Utility;
using dlns::VarIndex;

// Calls visit(values) for every assignment of `vars` (domain indices).
inline void enumerate(const Instance& inst, const std::vector<VarIndex>& vars,
                      const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> x(vars.size(), 0);
  while (true) {
    visit(x);
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++x[i] < inst.domain_size(vars[i])) break;
      x[i] = 0;
    }
    if (i == vars.size()) return;
  }
}

inline Utility table_sum(const Instance& inst, const std::vector<std::size_t>& full) {
  Utility total = 0.0;
  for (const auto& f : inst.functions()) total += f.at(full[f.first()], full[f.second()]);
  return total;
}

inline std::vector<VarIndex> all_vars(const Instance& inst) {
  std::vector<VarIndex> v(inst.num_variables());
  for (VarIndex i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

// max over complete assignments of F; -inf when every assignment is infeasible.
inline Utility brute_force_optimum(const Instance& inst, std::vector<std::size_t>* argmax = nullptr) {
  Utility best = dlns::kNegInf;
  bool first = true;
  enumerate(inst, all_vars(inst), [&](const std::vector<std::size_t>& x) {
    Utility u = table_sum(inst, x);
    if (first || u > best) {
      best = u;
      if (argmax) *argmax = x;
      first = false;
    }
  });
  return best;
}

/// Optimum over the destroyed variables of the sum of `edges` (function
/// indices), plus, when `with_preserved`, every function joining a destroyed
/// variable to a preserved one at the preserved variable's `prev` value.
inline Utility relaxed_optimum(const Instance& inst, const std::vector<bool>& destroyed,
                               const std::set<std::size_t>& edges, const Assignment& prev, bool with_preserved) {
  std::vector<VarIndex> ln;
  for (VarIndex v = 0; v < inst.num_variables(); ++v) {
    if (destroyed[v]) ln.push_back(v);
  }
  Utility best = dlns::kNegInf;
  enumerate(inst, ln, [&](const std::vector<std::size_t>& x) {
    std::vector<std::size_t> full(inst.num_variables());
    for (VarIndex v = 0; v < inst.num_variables(); ++v) full[v] = prev.bound(v) ? prev.at(v) : 0;
    for (std::size_t i = 0; i < ln.size(); ++i) full[ln[i]] = x[i];
    Utility u = 0.0;
    for (std::size_t f = 0; f < inst.num_functions(); ++f) {
      const auto& fn = inst.function(f);
      bool a = destroyed[fn.first()];
      bool b = destroyed[fn.second()];
      if ((a && b && edges.count(f)) || (with_preserved && a != b)) u += fn.at(full[fn.first()], full[fn.second()]);
    }
    best = dlns::max(best, u);
  });
  return best;
}

// Every non-tree edge joins a node to one of its ancestors (parent walk).
inline bool has_dfs_property(const dlns::ConstraintGraph& g, const dlns::PseudoTree& t) {
  std::set<std::size_t> tree_edges(t.tree_edges().begin(), t.tree_edges().end());
  auto ancestor = [&](VarIndex a, VarIndex v) {
    for (auto p = t.node(v).parent; p; p = t.node(*p).parent) {
      if (*p == a) return true;
    }
    return false;
  };
  for (const auto& e : g.edges()) {
    if (tree_edges.count(e.function)) continue;
    if (!ancestor(e.u, e.v) && !ancestor(e.v, e.u)) return false;
  }
  return true;
}

// Variables in at least one function that is -inf under `a`.
inline std::set<VarIndex> violated_variables(const Instance& inst, const Assignment& a) {
  std::set<VarIndex> out;
  for (const auto& f : inst.functions()) {
    if (f.at(a.at(f.first()), a.at(f.second())).is_neg_inf()) {
      out.insert(f.first());
      out.insert(f.second());
    }
  }
  return out;
}

/// f-hat of every function after a sequence of iterations, each given by its
/// relaxation edges and F~. Closed form: max table entry when never
/// optimized, otherwise the largest mean share over the iterations it took
/// part in.
inline std::vector<Utility> fhat_replay(const Instance& inst,
                                        const std::vector<std::pair<std::vector<std::size_t>, Utility>>& iterations) {
  std::vector<Utility> out(inst.num_functions());
  std::vector<bool> seen(inst.num_functions(), false);
  for (std::size_t f = 0; f < out.size(); ++f) {
    Utility m = dlns::kNegInf;
    for (Utility u : inst.function(f).table()) m = dlns::max(m, u);
    out[f] = m;
  }
  for (const auto& [edges, f_tilde] : iterations) {
    if (edges.empty()) continue;
    Utility share = f_tilde.is_finite() ? Utility(f_tilde.value() / static_cast<double>(edges.size())) : f_tilde;
    for (std::size_t f : edges) {
      out[f] = seen[f] ? dlns::max(out[f], share) : share;
      seen[f] = true;
    }
  }
  return out;
}

}  // namespace oracle
