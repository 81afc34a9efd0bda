#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dlns/errors.hpp"
#include "dlns/instance.hpp"

namespace dlns {

struct Edge {
  VarIndex u = 0;
  VarIndex v = 0;
  FuncIndex function = 0;
  int function_id = 0;

  VarIndex other(VarIndex x) const noexcept { return x == u ? v : u; }
};

/// Constraint graph over a subset of the instance's variables.
///
/// Node positions are VarIndex values in the full instance, so subgraphs
/// share indexing with the graph they were cut from.
class ConstraintGraph {
public:
  ConstraintGraph() = default;

  ConstraintGraph(std::vector<int> labels, std::vector<bool> present, std::vector<Edge> edges)
      : labels_(std::move(labels)), present_(std::move(present)), edges_(std::move(edges)) {
    adjacency_.assign(present_.size(), {});
    for (VarIndex v = 0; v < present_.size(); ++v) {
      if (present_[v]) nodes_.push_back(v);
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      adjacency_[edges_[e].u].push_back(e);
      adjacency_[edges_[e].v].push_back(e);
    }
  }

  // Number of variables in the instance the graph was built from.
  std::size_t universe() const noexcept { return present_.size(); }
  const std::vector<VarIndex>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool contains(VarIndex v) const noexcept { return v < present_.size() && present_[v]; }
  const std::vector<bool>& membership() const noexcept { return present_; }

  // Positions in edges() of the edges touching v.
  const std::vector<std::size_t>& incident_edges(VarIndex v) const { return adjacency_.at(v); }

  // Variable id, used for root selection.
  int label(VarIndex v) const { return labels_.at(v); }
  const std::vector<int>& labels() const noexcept { return labels_; }

  std::set<FuncIndex> function_set() const {
    std::set<FuncIndex> out;
    for (const auto& e : edges_) out.insert(e.function);
    return out;
  }

private:
  std::vector<int> labels_;
  std::vector<bool> present_;
  std::vector<VarIndex> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

inline ConstraintGraph build_graph(const Instance& inst) {
  std::vector<int> labels;
  labels.reserve(inst.num_variables());
  for (const auto& v : inst.variables()) labels.push_back(v.id);
  std::vector<Edge> edges;
  edges.reserve(inst.num_functions());
  for (FuncIndex f = 0; f < inst.num_functions(); ++f) {
    const auto& fn = inst.function(f);
    edges.push_back({fn.first(), fn.second(), f, fn.id()});
  }
  return {std::move(labels), std::vector<bool>(inst.num_variables(), true), std::move(edges)};
}

// Nodes in `keep` and the edges with both endpoints in `keep`.
inline ConstraintGraph induced_subgraph(const ConstraintGraph& g, const std::vector<bool>& keep) {
  std::vector<bool> present(g.universe(), false);
  for (VarIndex v = 0; v < g.universe(); ++v) present[v] = g.contains(v) && v < keep.size() && keep[v];
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (present[e.u] && present[e.v]) edges.push_back(e);
  }
  return {g.labels(), std::move(present), std::move(edges)};
}

inline ConstraintGraph induced_subgraph(const ConstraintGraph& g, std::span<const VarIndex> keep) {
  std::vector<bool> mask(g.universe(), false);
  for (VarIndex v : keep) {
    if (v >= mask.size()) throw StructuralError("induced_subgraph: node outside the graph");
    mask[v] = true;
  }
  return induced_subgraph(g, mask);
}

/// How many relaxation trees each function has been a tree edge of.
class EdgeUsage {
public:
  unsigned count(int function_id) const {
    auto it = counts_.find(function_id);
    return it == counts_.end() ? 0U : it->second;
  }

  void record(std::span<const int> tree_function_ids) {
    for (int id : tree_function_ids) ++counts_[id];
  }

  const std::map<int, unsigned>& counts() const noexcept { return counts_; }

private:
  std::map<int, unsigned> counts_;
};

struct TreeNode {
  std::optional<VarIndex> parent;
  std::optional<FuncIndex> parent_function;
  std::vector<VarIndex> children;
  std::vector<VarIndex> pseudo_parents;
  std::vector<VarIndex> pseudo_children;
  std::size_t depth = 0;
};

/// DFS pseudo-forest: a spanning forest of a constraint graph in which every
/// non-tree edge joins a node to one of its ancestors.
class PseudoTree {
public:
  PseudoTree() = default;
  explicit PseudoTree(std::size_t universe) : in_tree_(universe, false), nodes_(universe) {}

  std::size_t universe() const noexcept { return in_tree_.size(); }
  bool contains(VarIndex v) const noexcept { return v < in_tree_.size() && in_tree_[v]; }
  const TreeNode& node(VarIndex v) const { return nodes_.at(v); }
  const std::vector<VarIndex>& roots() const noexcept { return roots_; }
  // Preorder over the whole forest; roots in the order their trees were built.
  const std::vector<VarIndex>& order() const noexcept { return order_; }
  // Tree-edge function positions, ascending.
  const std::vector<FuncIndex>& tree_edges() const noexcept { return tree_edges_; }
  const std::vector<int>& tree_edge_ids() const noexcept { return tree_edge_ids_; }
  std::size_t size() const noexcept { return order_.size(); }

  // Longest root-to-node path, in edges.
  std::size_t height() const noexcept {
    std::size_t h = 0;
    for (VarIndex v : order_) h = std::max(h, nodes_[v].depth);
    return h;
  }

  bool is_ancestor(VarIndex ancestor, VarIndex v) const {
    for (auto p = nodes_.at(v).parent; p; p = nodes_[*p].parent) {
      if (*p == ancestor) return true;
    }
    return false;
  }

  // Children before parents.
  std::vector<VarIndex> post_order() const { return {order_.rbegin(), order_.rend()}; }

  // Assembles a tree from parent links; `preorder` must list parents before children.
  static PseudoTree from_parents(const ConstraintGraph& g, const std::vector<VarIndex>& preorder,
                                 const std::vector<std::optional<std::size_t>>& parent_edge) {
    PseudoTree t(g.universe());
    std::vector<bool> is_tree_edge(g.edges().size(), false);
    for (VarIndex v : preorder) {
      t.in_tree_[v] = true;
      t.order_.push_back(v);
      auto& node = t.nodes_[v];
      if (auto e = parent_edge[v]) {
        const Edge& edge = g.edges()[*e];
        VarIndex p = edge.other(v);
        node.parent = p;
        node.parent_function = edge.function;
        node.depth = t.nodes_[p].depth + 1;
        t.nodes_[p].children.push_back(v);
        is_tree_edge[*e] = true;
      } else {
        t.roots_.push_back(v);
      }
    }
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      if (is_tree_edge[e]) continue;
      const Edge& edge = g.edges()[e];
      VarIndex lo = edge.u;
      VarIndex hi = edge.v;
      if (t.nodes_[lo].depth > t.nodes_[hi].depth) std::swap(lo, hi);
      if (!t.is_ancestor(lo, hi)) {
        throw StructuralError("edge of function " + std::to_string(edge.function_id) +
                              " joins two different branches; not a DFS pseudo-tree");
      }
      t.nodes_[hi].pseudo_parents.push_back(lo);
      t.nodes_[lo].pseudo_children.push_back(hi);
    }
    std::vector<std::pair<FuncIndex, int>> tagged;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      if (is_tree_edge[e]) tagged.emplace_back(g.edges()[e].function, g.edges()[e].function_id);
    }
    std::sort(tagged.begin(), tagged.end());
    t.tree_edges_.clear();
    for (auto [f, id] : tagged) {
      t.tree_edges_.push_back(f);
      t.tree_edge_ids_.push_back(id);
    }
    for (auto& n : t.nodes_) {
      std::sort(n.pseudo_parents.begin(), n.pseudo_parents.end());
      std::sort(n.pseudo_children.begin(), n.pseudo_children.end());
    }
    return t;
  }

private:
  std::vector<bool> in_tree_;
  std::vector<TreeNode> nodes_;
  std::vector<VarIndex> roots_;
  std::vector<VarIndex> order_;
  std::vector<FuncIndex> tree_edges_;
  std::vector<int> tree_edge_ids_;
};

namespace detail {

// Unvisited nodes of g, ascending by variable id.
inline std::vector<VarIndex> nodes_by_label(const ConstraintGraph& g) {
  std::vector<VarIndex> out = g.nodes();
  std::sort(out.begin(), out.end(), [&](VarIndex a, VarIndex b) { return g.label(a) < g.label(b); });
  return out;
}

}  // namespace detail

/// DFS pseudo-forest of g. One tree per connected component, rooted at the
/// component's lowest variable id. At every step the DFS follows, among the
/// edges to unvisited nodes, the one with the lowest usage count, then the
/// lowest function id, then a seeded random rank.
inline PseudoTree dfs_pseudo_tree(const ConstraintGraph& g, const EdgeUsage& usage = {},
                                  std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> rank(g.edges().size());
  for (auto& r : rank) r = rng();

  auto key = [&](std::size_t e) {
    const Edge& edge = g.edges()[e];
    return std::make_tuple(usage.count(edge.function_id), edge.function_id, rank[e]);
  };

  std::vector<bool> visited(g.universe(), false);
  std::vector<std::optional<std::size_t>> parent_edge(g.universe());
  std::vector<VarIndex> preorder;
  preorder.reserve(g.nodes().size());

  for (VarIndex root : detail::nodes_by_label(g)) {
    if (visited[root]) continue;
    visited[root] = true;
    preorder.push_back(root);
    std::vector<VarIndex> stack{root};
    while (!stack.empty()) {
      VarIndex u = stack.back();
      std::optional<std::size_t> best;
      for (std::size_t e : g.incident_edges(u)) {
        if (visited[g.edges()[e].other(u)]) continue;
        if (!best || key(e) < key(*best)) best = e;
      }
      if (!best) {
        stack.pop_back();
        continue;
      }
      VarIndex w = g.edges()[*best].other(u);
      visited[w] = true;
      parent_edge[w] = *best;
      preorder.push_back(w);
      stack.push_back(w);
    }
  }
  return PseudoTree::from_parents(g, preorder, parent_edge);
}

/// Pseudo-forest whose tree edges are exactly the given functions (by id).
/// Trees are rooted at their lowest variable id. Throws StructuralError if the
/// edges do not form a spanning forest with the DFS property.
inline PseudoTree pseudo_tree_from_edges(const ConstraintGraph& g, std::span<const int> tree_function_ids) {
  std::set<int> wanted(tree_function_ids.begin(), tree_function_ids.end());
  std::vector<std::vector<std::size_t>> tree_adj(g.universe());
  std::size_t found = 0;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    if (wanted.count(g.edges()[e].function_id)) {
      tree_adj[g.edges()[e].u].push_back(e);
      tree_adj[g.edges()[e].v].push_back(e);
      ++found;
    }
  }
  if (found != wanted.size()) throw StructuralError("requested tree edge is not an edge of the graph");

  std::vector<bool> visited(g.universe(), false);
  std::vector<std::optional<std::size_t>> parent_edge(g.universe());
  std::vector<VarIndex> preorder;
  for (VarIndex root : detail::nodes_by_label(g)) {
    if (visited[root]) continue;
    visited[root] = true;
    preorder.push_back(root);
    std::vector<VarIndex> stack{root};
    while (!stack.empty()) {
      VarIndex u = stack.back();
      std::optional<std::size_t> next;
      for (std::size_t e : tree_adj[u]) {
        if (parent_edge[u] && *parent_edge[u] == e) continue;
        VarIndex w = g.edges()[e].other(u);
        if (visited[w]) {
          if (!parent_edge[w] || *parent_edge[w] != e) throw StructuralError("requested tree edges contain a cycle");
          continue;
        }
        if (!next || g.edges()[e].function_id < g.edges()[*next].function_id) next = e;
      }
      if (!next) {
        stack.pop_back();
        continue;
      }
      VarIndex w = g.edges()[*next].other(u);
      visited[w] = true;
      parent_edge[w] = *next;
      preorder.push_back(w);
      stack.push_back(w);
    }
  }
  return PseudoTree::from_parents(g, preorder, parent_edge);
}

/// Largest number of not-yet-eliminated neighbours met while eliminating the
/// nodes of g in `elimination_order` (first element eliminated first).
inline std::size_t induced_width(const ConstraintGraph& g, std::span<const VarIndex> elimination_order) {
  std::vector<std::set<VarIndex>> adj(g.universe());
  for (const auto& e : g.edges()) {
    adj[e.u].insert(e.v);
    adj[e.v].insert(e.u);
  }
  std::vector<bool> seen(g.universe(), false);
  for (VarIndex v : elimination_order) {
    if (!g.contains(v) || seen[v]) throw StructuralError("elimination order is not a permutation of the nodes");
    seen[v] = true;
  }
  if (elimination_order.size() != g.nodes().size()) {
    throw StructuralError("elimination order is not a permutation of the nodes");
  }
  std::vector<bool> gone(g.universe(), false);
  std::size_t width = 0;
  for (VarIndex v : elimination_order) {
    std::vector<VarIndex> live;
    for (VarIndex u : adj[v]) {
      if (!gone[u]) live.push_back(u);
    }
    width = std::max(width, live.size());
    for (std::size_t a = 0; a < live.size(); ++a) {
      for (std::size_t b = a + 1; b < live.size(); ++b) {
        adj[live[a]].insert(live[b]);
        adj[live[b]].insert(live[a]);
      }
    }
    gone[v] = true;
  }
  return width;
}

// Leaves-first elimination order for a pseudo-tree (reverse DFS preorder).
inline std::vector<VarIndex> elimination_order(const PseudoTree& t) { return t.post_order(); }

// Debug dump; tree edges solid, back edges dashed. Format not stable.
inline std::string to_dot(const ConstraintGraph& g, const PseudoTree* tree = nullptr) {
  std::ostringstream os;
  os << "graph dcop {\n";
  for (VarIndex v : g.nodes()) os << "  x" << g.label(v) << ";\n";
  std::set<FuncIndex> tree_fns;
  if (tree) tree_fns.insert(tree->tree_edges().begin(), tree->tree_edges().end());
  for (const auto& e : g.edges()) {
    os << "  x" << g.label(e.u) << " -- x" << g.label(e.v) << " [label=\"f" << e.function_id << "\"";
    if (tree && !tree_fns.count(e.function)) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace dlns
