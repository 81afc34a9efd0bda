#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "support.hpp"

using namespace dlns;

namespace {

std::set<std::size_t> all_edges(const ConstraintGraph& g) { return g.function_set(); }

}  // namespace

TEST(Separators, GoldenFullTree) {
  auto inst = support::golden();
  auto tree = dfs_pseudo_tree(build_graph(inst));
  auto sep = separators(tree);
  VarIndex x1 = inst.index_of(1), x2 = inst.index_of(2), x3 = inst.index_of(3), x4 = inst.index_of(4);
  // DFS from x1 follows f12, f24, f34: chain 1-2-4-3 with back edges 13 and 14.
  EXPECT_EQ(tree.node(x3).parent, x4);
  EXPECT_TRUE(sep[x1].empty());
  EXPECT_EQ(sep[x2], (std::vector<VarIndex>{x1}));
  EXPECT_EQ(sep[x4], (std::vector<VarIndex>{x1, x2}));
  EXPECT_EQ(sep[x3], (std::vector<VarIndex>{x1, x4}));
}

TEST(Separators, SeparatorHoldsExactlyTheConnectedAncestors) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = gen_random(10, 0.3, 2, 10, seed);
    auto g = build_graph(inst);
    auto tree = dfs_pseudo_tree(g, {}, seed);
    auto sep = separators(tree);
    for (VarIndex v : tree.order()) {
      // Ancestors of v joined by an edge to v or one of its descendants.
      std::set<VarIndex> want;
      for (const auto& e : g.edges()) {
        for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
          bool b_in_subtree = b == v || tree.is_ancestor(v, b);
          if (b_in_subtree && tree.is_ancestor(a, v)) want.insert(a);
        }
      }
      EXPECT_EQ(std::set<VarIndex>(sep[v].begin(), sep[v].end()), want) << "seed " << seed;
    }
  }
}

TEST(Dpop, AgreesWithTdbrOnTrees) {
  // A tree constraint graph leaves T-DBR nothing to drop.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = gen_scale_free(8, 3, 20, seed);
    std::vector<support::Fn> fns;
    auto tree_full = dfs_pseudo_tree(build_graph(inst));
    for (FuncIndex f : tree_full.tree_edges()) {
      const auto& fn = inst.function(f);
      fns.push_back({static_cast<int>(fn.first()), static_cast<int>(fn.second()),
                     std::vector<Utility>(fn.table().begin(), fn.table().end())});
    }
    auto tree_inst = support::build(std::vector<std::vector<int>>(8, {0, 1, 2}), fns);
    auto flags = destroy_random(8, 0.7, seed, 1);
    auto ln = large_neighborhood(flags);
    auto g = induced_subgraph(build_graph(tree_inst), ln);
    auto tree = dfs_pseudo_tree(g);
    auto prev = initialize_values(tree_inst, InitMode::random, seed);
    Network a(8);
    Network b(8);
    auto utils = util_propagation(a, tree_inst, tree, prev);
    auto tv = value_propagation(a, tree_inst, tree, utils, prev, prev);
    auto dr = solve_relaxed_exact(b, tree_inst, tree, prev, prev);
    EXPECT_EQ(dr.f_tilde, relaxed_optimum_hat(tree, utils));
    EXPECT_EQ(dr.f_check, relaxed_optimum_check(tree, utils));
    EXPECT_EQ(evaluate_total(tree_inst, dr.check), evaluate_total(tree_inst, tv.check));
    EXPECT_LE(dr.max_separator, 1u);
  }
}

TEST(Dpop, AllDestroyedFindsTheOptimum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = gen_random(7, 0.5, 3, 40, seed);
    auto tree = dfs_pseudo_tree(build_graph(inst), {}, seed);
    auto prev = initialize_values(inst, InitMode::random, seed);
    Network net(7);
    auto r = solve_relaxed_exact(net, inst, tree, prev, prev);
    Utility opt = oracle::brute_force_optimum(inst);
    EXPECT_EQ(r.f_check, opt);
    EXPECT_EQ(r.f_tilde, opt);
    EXPECT_EQ(evaluate_total(inst, r.check), opt);
    EXPECT_EQ(evaluate_total(inst, r.hat), opt);
  }
}

TEST(Dpop, RelaxedOptimaMatchEnumeration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = gen_random(8, 0.5, 3, 40, 100 + seed);
    auto flags = destroy_random(8, 0.6, seed, 3);
    auto ln = large_neighborhood(flags);
    auto g = induced_subgraph(build_graph(inst), ln);
    auto tree = dfs_pseudo_tree(g, {}, seed);
    auto prev = initialize_values(inst, InitMode::random, seed);
    Network net(8);
    auto r = solve_relaxed_exact(net, inst, tree, prev, prev);
    EXPECT_TRUE(near(r.f_check, oracle::relaxed_optimum(inst, ln, all_edges(g), prev, true))) << "seed " << seed;
    EXPECT_TRUE(near(r.f_tilde, oracle::relaxed_optimum(inst, ln, all_edges(g), prev, false))) << "seed " << seed;
    // With every edge of G^k kept, F(x-check) adds only the preserved-only functions.
    Utility preserved_only = 0.0;
    for (const auto& f : inst.functions()) {
      if (!ln[f.first()] && !ln[f.second()]) preserved_only += f.at(prev.at(f.first()), prev.at(f.second()));
    }
    EXPECT_TRUE(near(evaluate_total(inst, r.check), r.f_check + preserved_only)) << "seed " << seed;
  }
}

TEST(Dpop, OddCycleOfDifferConstraintsIsInfeasible) {
  auto inst = support::build({{0, 1}, {0, 1}, {0, 1}},
                             {{0, 1, {kNegInf, 3, 3, kNegInf}}, {1, 2, {kNegInf, 1, 1, kNegInf}},
                              {0, 2, {kNegInf, 5, 5, kNegInf}}});
  auto tree = dfs_pseudo_tree(build_graph(inst));
  auto prev = support::assign(inst, {{0, 0}, {1, 0}, {2, 0}});
  Network net(3);
  auto r = solve_relaxed_exact(net, inst, tree, prev, prev);
  EXPECT_TRUE(r.f_check.is_neg_inf());  // odd cycle of "differ" constraints
  EXPECT_TRUE(oracle::brute_force_optimum(inst).is_neg_inf());
}

TEST(Dpop, WidthCapRejectsBeforeSolving) {
  auto inst = gen_random(8, 0.5, 2, 10, 1);  // complete graph
  auto tree = dfs_pseudo_tree(build_graph(inst));
  auto prev = initialize_values(inst, InitMode::random, 1);
  Network net(8);
  DpopLimits limits;
  limits.width_cap = 2;
  try {
    solve_relaxed_exact(net, inst, tree, prev, prev, limits);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("above the width cap 2"), std::string::npos);
  }
  EXPECT_EQ(net.sent()[0], 0u);  // nothing was sent
}

TEST(Dpop, MemoryGuardRejectsLargeTables) {
  auto inst = gen_random(6, 0.5, 10, 10, 2);
  auto tree = dfs_pseudo_tree(build_graph(inst));
  auto prev = initialize_values(inst, InitMode::random, 2);
  Network net(6);
  DpopLimits limits;
  limits.max_table_bytes = 4096;
  EXPECT_THROW(solve_relaxed_exact(net, inst, tree, prev, prev, limits), CapacityError);
}

TEST(Dpop, GoldenMessageCountsAndSizes) {
  auto inst = support::golden();
  auto tree = dfs_pseudo_tree(build_graph(inst));
  auto x0 = support::golden_x0(inst);
  Network net(4);
  auto r = solve_relaxed_exact(net, inst, tree, x0, x0);
  // One VALUE message per neighbour pair direction.
  EXPECT_EQ(r.metrics.messages(MessageKind::value), 10u);
  // Largest message: a UTIL over a two-variable binary separator, 4 rows per table.
  EXPECT_EQ(r.metrics.max_payload, 8u);
}

TEST(DpopRepair, RunErrorNamesTheIteration) {
  auto inst = gen_random(12, 0.5, 2, 10, 5);
  DpopLimits limits;
  limits.width_cap = 1;
  DpopDbrRepair rep(limits);
  RandomDestroy destroy(1.0, 0);
  TerminationRule term;
  term.max_iterations = 3;
  try {
    run(inst, rep, destroy, term);
    FAIL() << "expected RunError";
  } catch (const RunError& e) {
    EXPECT_EQ(e.iteration(), 1u);
  }
}
