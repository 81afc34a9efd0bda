#include <gtest/gtest.h>

#include <random>

#include "../oracles.hpp"
#include "support.hpp"

using namespace dlns;

TEST(Utility, NegInfAbsorbsAddition) {
  EXPECT_TRUE((kNegInf + Utility(5.0)).is_neg_inf());
  EXPECT_TRUE((Utility(5.0) + kNegInf).is_neg_inf());
  EXPECT_EQ(Utility(2.0) + Utility(3.0), Utility(5.0));
}

TEST(Utility, MaxIgnoresNegInf) {
  EXPECT_EQ(max(kNegInf, Utility(3.0)), Utility(3.0));
  EXPECT_EQ(max(Utility(3.0), kNegInf), Utility(3.0));
  EXPECT_TRUE(max(kNegInf, kNegInf).is_neg_inf());
}

TEST(Utility, OrderingPlacesNegInfLowest) {
  EXPECT_LT(kNegInf, Utility(0.0));
  EXPECT_FALSE(kNegInf < kNegInf);
  EXPECT_EQ(kNegInf, kNegInf);
}

TEST(Utility, ToStringFormats) {
  EXPECT_EQ(to_string(kNegInf), "-inf");
  EXPECT_EQ(to_string(Utility(42.0)), "42");
  EXPECT_EQ(to_string(Utility(16.0) / 3), "5.333333333333333");
}

TEST(Utility, NearUsesAbsoluteTolerance) {
  EXPECT_TRUE(near(Utility(1.0), Utility(1.0 + 1e-10)));
  EXPECT_FALSE(near(Utility(1.0), Utility(1.0 + 1e-8)));
  EXPECT_FALSE(near(kNegInf, Utility(0.0)));
}

TEST(Evaluate, GoldenInitialAssignmentScoresTen) {
  auto inst = support::golden();
  EXPECT_EQ(evaluate_total(inst, support::golden_x0(inst)), Utility(10.0));
}

TEST(Evaluate, EmptyFunctionSetScoresZero) {
  auto inst = support::build({{0, 1}, {0, 1}}, {});
  EXPECT_EQ(evaluate_total(inst, support::assign(inst, {{0, 1}, {1, 0}})), Utility(0.0));
}

TEST(Evaluate, PartialAssignmentCountsOnlyBoundScopes) {
  auto inst = support::golden();
  auto a = support::assign(inst, {{1, 0}, {3, 0}});
  EXPECT_EQ(evaluate_total(inst, a), Utility(10.0));  // only f13 applies
}

TEST(Evaluate, TotalMatchesPerFunctionSumsByEnumeration) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cost(0, 100);
  std::vector<support::Fn> fns;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      std::vector<Utility> t(9);
      for (auto& u : t) u = cost(rng);
      fns.push_back({a, b, t});
    }
  }
  auto inst = support::build({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}}, fns);
  oracle::enumerate(inst, oracle::all_vars(inst), [&](const std::vector<std::size_t>& x) {
    Assignment a(4);
    for (VarIndex v = 0; v < 4; ++v) a.set_index(v, static_cast<int>(x[v]));
    Utility sum = 0.0;
    for (const auto& f : inst.functions()) {
      sum += evaluate_function(inst, f, inst.value_at(f.first(), x[f.first()]), inst.value_at(f.second(), x[f.second()]));
    }
    EXPECT_EQ(evaluate_total(inst, a), sum);
  });
}

TEST(Evaluate, SingleNegInfEntryMakesTotalNegInf) {
  auto inst = support::build({{0, 1}, {0, 1}, {0, 1}},
                             {{0, 1, {1, 2, 3, kNegInf}}, {1, 2, {5, 5, 5, 5}}});
  EXPECT_TRUE(evaluate_total(inst, support::assign(inst, {{0, 1}, {1, 1}, {2, 0}})).is_neg_inf());
  EXPECT_EQ(evaluate_total(inst, support::assign(inst, {{0, 1}, {1, 0}, {2, 0}})), Utility(8.0));
}

TEST(EvaluateFunction, GoldenF13AtZeroZeroIsTen) {
  auto inst = support::golden();
  const auto& f13 = inst.function(*inst.function_between(inst.index_of(1), inst.index_of(3)));
  EXPECT_EQ(evaluate_function(inst, f13, 0, 0), Utility(10.0));
}

TEST(EvaluateFunction, ScopeOrderIsIrrelevant) {
  auto inst = support::golden();
  VarIndex x1 = inst.index_of(1);
  VarIndex x4 = inst.index_of(4);
  const auto& f14 = inst.function(*inst.function_between(x1, x4));
  for (int a : {0, 1}) {
    for (int b : {0, 1}) EXPECT_EQ(evaluate_function(inst, f14, x1, a, x4, b), evaluate_function(inst, f14, x4, b, x1, a));
  }
}

TEST(EvaluateFunction, ValueOutsideDomainThrows) {
  auto inst = support::golden();
  EXPECT_THROW(evaluate_function(inst, inst.function(0), 0, 7), StructuralError);
}

TEST(EvaluateFunction, GeneratedTableMatchesStoredEntries) {
  auto inst = gen_random(5, 0.5, 4, 100, 11);
  for (const auto& f : inst.functions()) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(evaluate_function(inst, f, inst.value_at(f.first(), i), inst.value_at(f.second(), j)),
                  f.table()[i * 4 + j]);
      }
    }
  }
}

TEST(MaxPair, GoldenFunctionsAllPeakAtTen) {
  auto inst = support::golden();
  Utility total = 0.0;
  for (const auto& f : inst.functions()) {
    EXPECT_EQ(max_pair(f), Utility(10.0));
    total += max_pair(f);
  }
  EXPECT_EQ(total, Utility(50.0));
}

TEST(MaxPair, ConstantZeroTable) {
  auto inst = support::build({{0, 1}, {0, 1}}, {{0, 1, {0, 0, 0, 0}}});
  EXPECT_EQ(max_pair(inst.function(0)), Utility(0.0));
}

TEST(MaxPair, MatchesExhaustiveScan) {
  auto inst = gen_random(6, 0.5, 5, 100, 5);
  for (const auto& f : inst.functions()) {
    Utility best = kNegInf;
    for (std::size_t i = 0; i < f.rows(); ++i) {
      for (std::size_t j = 0; j < f.cols(); ++j) best = max(best, f.at(i, j));
    }
    EXPECT_EQ(max_pair(f), best);
  }
}

TEST(Neighbors, GoldenAgentOneSeesTheOtherThree) {
  auto inst = support::golden();
  EXPECT_EQ(neighbors(inst, 1), (std::set<int>{2, 3, 4}));
  EXPECT_EQ(neighbors(inst, 3), (std::set<int>{1, 4}));
}

TEST(Neighbors, IsolatedAgentHasNone) {
  auto inst = support::build({{0}, {0}, {0}}, {{0, 1, {1}}});
  EXPECT_TRUE(neighbors(inst, 2).empty());
}

TEST(Neighbors, MatchesEdgeListScan) {
  auto inst = gen_random(8, 0.3, 2, 10, 9);
  for (VarIndex v = 0; v < inst.num_variables(); ++v) {
    std::set<int> expect;
    for (const auto& f : inst.functions()) {
      if (f.first() == v) expect.insert(inst.agent_of(f.second()));
      if (f.second() == v) expect.insert(inst.agent_of(f.first()));
    }
    EXPECT_EQ(neighbors(inst, inst.agent_of(v)), expect);
  }
}

TEST(Instance, RejectsTwoFunctionsOnOnePair) {
  EXPECT_THROW(support::build({{0}, {0}}, {{0, 1, {1}}, {1, 0, {2}}}), StructuralError);
}

TEST(Instance, RejectsNegativeUtility) {
  EXPECT_THROW(support::build({{0}, {0}}, {{0, 1, {-1.0}}}), StructuralError);
}

TEST(Instance, RejectsSelfScope) {
  EXPECT_THROW(BinaryFunction(0, 1, 1, 1, 1, {Utility(0.0)}), StructuralError);
}

TEST(Instance, RejectsPartialTable) {
  EXPECT_THROW(BinaryFunction(0, 0, 1, 2, 2, {Utility(0.0)}), StructuralError);
}

TEST(Instance, RejectsAgentOwningTwoVariables) {
  std::vector<Variable> vars{{0, {0}}, {1, {0}}};
  EXPECT_THROW(Instance(vars, {7, 7}, {}), StructuralError);
}

TEST(Instance, UnknownVariableIdThrows) {
  auto inst = support::golden();
  EXPECT_THROW(inst.index_of(99), StructuralError);
  Assignment a(4);
  EXPECT_THROW(a.bind(inst, 99, 0), StructuralError);
}

TEST(Assignment, BindRejectsValueOutsideDomain) {
  auto inst = support::golden();
  Assignment a(4);
  EXPECT_THROW(a.bind(inst, 1, 5), StructuralError);
  a.bind(inst, 1, 1);
  EXPECT_EQ(a.value(inst, 1), 1);
  EXPECT_FALSE(a.value(inst, 2).has_value());
}
