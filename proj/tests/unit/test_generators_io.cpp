#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace dlns;

namespace {

std::vector<std::size_t> degrees(const Instance& inst) {
  std::vector<std::size_t> d(inst.num_variables(), 0);
  for (const auto& f : inst.functions()) {
    ++d[f.first()];
    ++d[f.second()];
  }
  return d;
}

bool is_connected(const Instance& inst) {
  std::vector<bool> seen(inst.num_variables(), false);
  std::vector<VarIndex> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    VarIndex v = stack.back();
    stack.pop_back();
    for (VarIndex u : inst.neighbors_of(v)) {
      if (!seen[u]) {
        seen[u] = true;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == inst.num_variables();
}

}  // namespace

TEST(Random, EdgeCountAndConnectivity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (double p1 : {0.1, 0.2, 0.35}) {
      std::size_t n = 20;
      auto inst = gen_random(n, p1, 3, 10, seed);
      EXPECT_EQ(inst.num_functions(), static_cast<std::size_t>(std::floor(n * (n - 1) * p1)));
      EXPECT_TRUE(is_connected(inst));
    }
  }
}

TEST(Random, HalfDensityOnTwentyNodesIsComplete) {
  auto inst = gen_random(20, 0.5, 2, 10, 0);
  EXPECT_EQ(inst.num_functions(), 190u);
}

TEST(Random, UtilitiesWithinRange) {
  auto inst = gen_random(10, 0.3, 4, 7, 3);
  for (const auto& f : inst.functions()) {
    for (Utility u : f.table()) {
      EXPECT_GE(u.value(), 0.0);
      EXPECT_LE(u.value(), 7.0);
      EXPECT_EQ(u.value(), std::floor(u.value()));
    }
  }
}

TEST(Random, InfeasibleBudgetsAreRejected) {
  EXPECT_THROW(gen_random(10, 0.05, 2, 10, 0), ConfigError);  // 4 edges cannot connect 10 nodes
  EXPECT_THROW(gen_random(10, 0.8, 2, 10, 0), ConfigError);   // 72 edges exceed 45 pairs
  EXPECT_THROW(gen_random(1, 0.5, 2, 10, 0), ConfigError);
  EXPECT_THROW(gen_random(5, 0.5, 0, 10, 0), ConfigError);
}

TEST(Random, SameSeedSameInstance) {
  EXPECT_EQ(to_json_string(gen_random(12, 0.3, 3, 10, 5)), to_json_string(gen_random(12, 0.3, 3, 10, 5)));
  EXPECT_NE(to_json_string(gen_random(12, 0.3, 3, 10, 5)), to_json_string(gen_random(12, 0.3, 3, 10, 6)));
}

TEST(ScaleFree, EdgeCounts) {
  EXPECT_EQ(gen_scale_free(3, 2, 10, 0).num_functions(), 3u);
  EXPECT_EQ(gen_scale_free(50, 2, 10, 0).num_functions(), 97u);
  EXPECT_THROW(gen_scale_free(2, 2, 10, 0), ConfigError);
}

TEST(ScaleFree, EveryNewNodeHasDegreeAtLeastTwo) {
  auto inst = gen_scale_free(40, 2, 10, 9);
  auto d = degrees(inst);
  for (VarIndex v = 2; v < d.size(); ++v) EXPECT_GE(d[v], 2u);
  EXPECT_TRUE(is_connected(inst));
}

TEST(Grid, FourNeighbourLattice) {
  auto inst = gen_grid(3, 3, 2, 10, 0);
  EXPECT_EQ(inst.num_functions(), 12u);
  auto d = degrees(inst);
  EXPECT_EQ(d[0], 2u);
  EXPECT_EQ(d[2], 2u);
  EXPECT_EQ(d[6], 2u);
  EXPECT_EQ(d[8], 2u);
  EXPECT_EQ(d[1], 3u);
  EXPECT_EQ(d[4], 4u);
  EXPECT_EQ(gen_grid(4, 5, 2, 10, 0).num_functions(), 4u * 4u + 3u * 5u);
  EXPECT_THROW(gen_grid(1, 4, 2, 10, 0), ConfigError);
}

TEST(Meeting, ParticipantCalibration) {
  EXPECT_EQ(participant_count(gen_meeting(MeetingParams{}, 1)), 95u);
  MeetingParams fifty;
  fifty.meetings = 50;
  EXPECT_EQ(participant_count(gen_meeting(fifty, 1)), 612u);
  // One participant per link; the 100-meeting topology alone gives the count.
  std::mt19937_64 rng(1);
  EXPECT_EQ(random_topology(100, 0.25, rng).size(), 2475u);
}

TEST(Meeting, HardConstraintsExactlyOnOverlaps) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = gen_meeting(MeetingParams{}, seed);
    const auto& meetings = *inst.meetings();
    for (const auto& f : inst.functions()) {
      int da = meetings[f.first()].duration;
      int db = meetings[f.second()].duration;
      for (std::size_t i = 0; i < f.rows(); ++i) {
        for (std::size_t j = 0; j < f.cols(); ++j) {
          int sa = inst.value_at(f.first(), i);
          int sb = inst.value_at(f.second(), j);
          bool disjoint = sa + da <= sb || sb + db <= sa;
          EXPECT_EQ(f.at(i, j).is_neg_inf(), !disjoint);
        }
      }
    }
  }
}

TEST(Meeting, DomainsAndDurations) {
  auto inst = gen_meeting(MeetingParams{}, 4);
  const auto& meetings = *inst.meetings();
  for (VarIndex v = 0; v < inst.num_variables(); ++v) {
    int dur = meetings[v].duration;
    EXPECT_GE(dur, 1);
    EXPECT_LE(dur, 8);
    const auto& dom = inst.variable(v).domain;
    EXPECT_EQ(dom.front(), 0);
    EXPECT_EQ(dom.back(), 100 - dur);
    EXPECT_EQ(dom.size(), static_cast<std::size_t>(101 - dur));
  }
}

TEST(Meeting, LinkedMeetingsShareOneParticipant) {
  auto inst = gen_meeting(MeetingParams{}, 8);
  const auto& meetings = *inst.meetings();
  for (const auto& f : inst.functions()) {
    const auto& a = meetings[f.first()].participants;
    const auto& b = meetings[f.second()].participants;
    std::vector<int> shared;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    EXPECT_EQ(shared.size(), 1u);
    for (Utility u : f.table()) {
      if (u.is_finite()) {
        EXPECT_LE(u.value(), 20.0);
      }
    }
  }
}

TEST(Io, RoundTripIsByteIdentical) {
  MeetingParams small;
  small.meetings = 6;
  small.horizon = 20;
  std::vector<Instance> cases{gen_random(8, 0.3, 3, 10, 1), gen_scale_free(8, 2, 10, 1), gen_grid(2, 3, 2, 10, 1),
                              gen_meeting(small, 1), support::golden()};
  for (const auto& inst : cases) {
    std::string first = to_json_string(inst);
    std::string second = to_json_string(parse_instance(first));
    EXPECT_EQ(first, second);
  }
}

TEST(Io, RoundTripPreservesSemantics) {
  auto inst = gen_random(7, 0.4, 3, 10, 2);
  auto back = parse_instance(to_json_string(inst));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto a = initialize_values(inst, InitMode::random, seed);
    EXPECT_EQ(evaluate_total(inst, a), evaluate_total(back, a));
  }
}

TEST(Io, NegInfIsWrittenAsString) {
  auto inst = support::build({{0, 1}, {0, 1}}, {{0, 1, {kNegInf, 1.5, 2, 3}}});
  std::string text = to_json_string(inst);
  EXPECT_NE(text.find("\"-inf\""), std::string::npos);
  EXPECT_NE(text.find("1.5"), std::string::npos);
  auto back = parse_instance(text);
  EXPECT_TRUE(back.function(0).at(0, 0).is_neg_inf());
}

TEST(Io, TruncatedFileIsAParseError) {
  std::string text = to_json_string(support::golden());
  EXPECT_THROW(parse_instance(text.substr(0, text.size() / 2)), ParseError);
}

TEST(Io, SchemaErrorsNameTheField) {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      parse_instance(text);
      ADD_FAILURE() << "expected ParseError for " << field;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  const std::string vars = R"("variables": [{"id": 1, "domain": [0, 1]}, {"id": 2, "domain": [0, 1]}])";
  const std::string agents = R"("agents": [{"id": 1, "owns": [1]}, {"id": 2, "owns": [2]}])";
  expect_field("{" + vars + "," + agents + "}", "$.functions");
  expect_field("{" + vars + "," + agents + R"(, "functions": [{"id": 0, "scope": [1, 2], "table": [[0, 0, 1]]}]})",
               "$.functions[0].table");
  expect_field("{" + vars + "," + agents +
                   R"(, "functions": [{"id": 0, "scope": [1, 2], "table": [[0, 0, 1], [0, 1, 1], [1, 0, 1], [1, 7, 1]]}]})",
               "$.functions[0].table[3]");
  expect_field("{" + vars + "," + agents + R"(, "functions": [{"id": 0, "scope": [1, 9], "table": []}]})",
               "$.functions[0].scope");
  expect_field("{" + vars + R"(, "agents": [{"id": 1, "owns": [1]}], "functions": []})", "$.agents");
  expect_field(R"({"variables": [{"id": 1, "domain": [0, "x"]}], "agents": [], "functions": []})",
               "$.variables[0].domain[1]");
}

TEST(Io, MissingFileIsAParseError) { EXPECT_THROW(load_instance("/nonexistent/instance.json"), ParseError); }

TEST(Io, GoldenFixtureShape) {
  auto inst = support::golden();
  EXPECT_EQ(inst.num_variables(), 4u);
  EXPECT_EQ(inst.num_functions(), 5u);
  std::set<int> ids;
  for (const auto& f : inst.functions()) ids.insert(f.id());
  EXPECT_EQ(ids, (std::set<int>{12, 13, 14, 24, 34}));
}

TEST(Io, ProvenanceSurvives) {
  auto inst = gen_grid(2, 2, 2, 5, 42);
  auto back = parse_instance(to_json_string(inst));
  EXPECT_EQ(back.provenance(), inst.provenance());
  EXPECT_NE(back.provenance().find("\"seed\":42"), std::string::npos);
}
