#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dlns/errors.hpp"
#include "dlns/instance.hpp"

namespace dlns {

using EdgeList = std::vector<std::pair<VarIndex, VarIndex>>;

namespace detail {

inline bool connected(std::size_t n, const EdgeList& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (auto [a, b] : edges) {
    auto ra = find(a);
    auto rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components <= 1;
}

inline Instance uniform_instance(std::size_t n, std::size_t d, const EdgeList& edges, int cost_max,
                                 std::mt19937_64& rng, const nlohmann::json& provenance) {
  if (d == 0) throw ConfigError("domain size must be positive");
  if (cost_max < 0) throw ConfigError("cost_max must be nonnegative");
  std::vector<Variable> vars;
  std::vector<int> owners;
  for (std::size_t v = 0; v < n; ++v) {
    Variable var;
    var.id = static_cast<int>(v);
    var.domain.resize(d);
    std::iota(var.domain.begin(), var.domain.end(), 0);
    vars.push_back(std::move(var));
    owners.push_back(static_cast<int>(v));
  }
  std::uniform_int_distribution<int> cost(0, cost_max);
  std::vector<BinaryFunction> fns;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::vector<Utility> table(d * d);
    for (auto& u : table) u = cost(rng);
    fns.emplace_back(static_cast<int>(e), edges[e].first, edges[e].second, d, d, std::move(table));
  }
  Instance inst(std::move(vars), std::move(owners), std::move(fns));
  inst.set_provenance(provenance.dump());
  return inst;
}

}  // namespace detail

// Connected graph with exactly floor(n (n-1) p1) edges, by rejection sampling.
inline EdgeList random_topology(std::size_t n, double p1, std::mt19937_64& rng) {
  if (n < 2) throw ConfigError("random network needs n >= 2");
  if (!(p1 > 0.0 && p1 <= 1.0)) throw ConfigError("p1 must lie in (0, 1]");
  const auto m = static_cast<std::size_t>(std::floor(static_cast<double>(n) * static_cast<double>(n - 1) * p1));
  const std::size_t pairs = n * (n - 1) / 2;
  if (m < n - 1) {
    throw ConfigError("edge budget " + std::to_string(m) + " cannot connect " + std::to_string(n) + " nodes");
  }
  if (m > pairs) {
    throw ConfigError("edge budget " + std::to_string(m) + " exceeds the " + std::to_string(pairs) +
                      " distinct pairs of a simple graph");
  }
  EdgeList all;
  for (VarIndex a = 0; a < n; ++a) {
    for (VarIndex b = a + 1; b < n; ++b) all.emplace_back(a, b);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::shuffle(all.begin(), all.end(), rng);
    EdgeList pick(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
    if (!detail::connected(n, pick)) continue;
    std::sort(pick.begin(), pick.end());
    return pick;
  }
  throw ConfigError("could not draw a connected random network");
}

inline Instance gen_random(std::size_t n, double p1, std::size_t d, int cost_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EdgeList edges = random_topology(n, p1, rng);
  nlohmann::json prov = {{"family", "random"}, {"n", n}, {"p1", p1}, {"d", d}, {"cost_max", cost_max}, {"seed", seed}};
  return detail::uniform_instance(n, d, edges, cost_max, rng, prov);
}

/// Barabasi-Albert: start from one edge, then attach each new node to two
/// distinct existing nodes picked with probability proportional to degree.
inline Instance gen_scale_free(std::size_t n, std::size_t d, int cost_max, std::uint64_t seed) {
  if (n < 3) throw ConfigError("scale-free network needs n >= 3");
  std::mt19937_64 rng(seed);
  EdgeList edges{{0, 1}};
  std::vector<VarIndex> ends{0, 1};  // each node once per incident edge
  for (VarIndex t = 2; t < n; ++t) {
    std::set<VarIndex> targets;
    while (targets.size() < 2) {
      std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
      targets.insert(ends[pick(rng)]);
    }
    for (VarIndex u : targets) {
      edges.emplace_back(u, t);
      ends.push_back(u);
      ends.push_back(t);
    }
  }
  nlohmann::json prov = {{"family", "scale_free"}, {"n", n}, {"d", d}, {"cost_max", cost_max}, {"seed", seed}};
  return detail::uniform_instance(n, d, edges, cost_max, rng, prov);
}

inline Instance gen_grid(std::size_t rows, std::size_t cols, std::size_t d, int cost_max, std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ConfigError("grid needs at least 2 rows and 2 columns");
  std::mt19937_64 rng(seed);
  EdgeList edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      VarIndex v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  nlohmann::json prov = {{"family", "grid"}, {"rows", rows}, {"cols", cols}, {"d", d}, {"cost_max", cost_max}, {"seed", seed}};
  return detail::uniform_instance(rows * cols, d, edges, cost_max, rng, prov);
}

struct MeetingParams {
  std::size_t meetings = 20;
  double p1 = 0.25;
  int horizon = 100;  // start slots and end times lie in [0, horizon]
  int min_duration = 1;
  int max_duration = 8;
  int max_preference = 10;
};

/// Meeting scheduling, one variable per meeting holding its start slot.
///
/// Meetings that share a participant are linked by a random network; each
/// link gets its own participant who attends both meetings. The function on
/// a link is -inf when the two meetings overlap and otherwise the sum of the
/// shared participants' preferences for the two start slots.
inline Instance gen_meeting(const MeetingParams& params, std::uint64_t seed) {
  if (params.meetings < 2) throw ConfigError("meeting scheduling needs at least 2 meetings");
  if (params.min_duration < 1 || params.max_duration < params.min_duration || params.max_duration > params.horizon) {
    throw ConfigError("meeting durations must satisfy 1 <= min <= max <= horizon");
  }
  std::mt19937_64 rng(seed);
  const std::size_t m = params.meetings;
  EdgeList edges = random_topology(m, params.p1, rng);

  std::uniform_int_distribution<int> duration(params.min_duration, params.max_duration);
  std::vector<Meeting> meetings(m);
  for (auto& mt : meetings) mt.duration = duration(rng);
  std::uniform_int_distribution<int> pref(0, params.max_preference);
  std::vector<std::vector<int>> preference(edges.size());
  for (std::size_t p = 0; p < edges.size(); ++p) {
    meetings[edges[p].first].participants.push_back(static_cast<int>(p));
    meetings[edges[p].second].participants.push_back(static_cast<int>(p));
    preference[p].resize(static_cast<std::size_t>(params.horizon) + 1);
    for (auto& x : preference[p]) x = pref(rng);
  }

  std::vector<Variable> vars;
  std::vector<int> owners;
  for (std::size_t v = 0; v < m; ++v) {
    Variable var;
    var.id = static_cast<int>(v);
    for (int s = 0; s + meetings[v].duration <= params.horizon; ++s) var.domain.push_back(s);
    vars.push_back(std::move(var));
    owners.push_back(static_cast<int>(v));
  }
  std::vector<BinaryFunction> fns;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [a, b] = edges[e];
    const auto& pa = meetings[a].participants;
    const auto& pb = meetings[b].participants;
    std::vector<int> shared;
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(shared));
    const auto& da = vars[a].domain;
    const auto& db = vars[b].domain;
    std::vector<Utility> table(da.size() * db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
      for (std::size_t j = 0; j < db.size(); ++j) {
        int sa = da[i];
        int sb = db[j];
        bool overlap = sa < sb + meetings[b].duration && sb < sa + meetings[a].duration;
        if (overlap) {
          table[i * db.size() + j] = kNegInf;
          continue;
        }
        double u = 0.0;
        for (int p : shared) u += preference[p][sa] + preference[p][sb];
        table[i * db.size() + j] = u;
      }
    }
    fns.emplace_back(static_cast<int>(e), a, b, da.size(), db.size(), std::move(table));
  }
  Instance inst(std::move(vars), std::move(owners), std::move(fns));
  inst.set_meetings(std::move(meetings));
  nlohmann::json prov = {{"family", "meeting"},
                         {"meetings", m},
                         {"p1", params.p1},
                         {"horizon", params.horizon},
                         {"min_duration", params.min_duration},
                         {"max_duration", params.max_duration},
                         {"max_preference", params.max_preference},
                         {"seed", seed}};
  inst.set_provenance(prov.dump());
  return inst;
}

// Distinct participants over all meetings.
inline std::size_t participant_count(const Instance& inst) {
  std::set<int> all;
  if (inst.meetings()) {
    for (const auto& m : *inst.meetings()) all.insert(m.participants.begin(), m.participants.end());
  }
  return all.size();
}

}  // namespace dlns
