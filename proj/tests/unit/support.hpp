#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <vector>

#include "dlns/dlns.hpp"

namespace support {

// Four-variable, five-function instance whose tables reproduce the worked
// example values (see tests/fixtures/derive_golden_fixture.py).
inline dlns::Instance golden() { return dlns::load_instance(DLNS_GOLDEN_FIXTURE); }

// Assignment by variable id.
inline dlns::Assignment assign(const dlns::Instance& inst, std::initializer_list<std::pair<int, int>> values) {
  dlns::Assignment a(inst.num_variables());
  for (auto [id, value] : values) a.bind(inst, id, value);
  return a;
}

inline dlns::Assignment golden_x0(const dlns::Instance& inst) { return assign(inst, {{1, 0}, {2, 1}, {3, 0}, {4, 0}}); }

inline std::optional<std::vector<int>> golden_trees(std::size_t k) {
  if (k == 1) return std::vector<int>{13, 34};
  if (k == 2) return std::vector<int>{12, 24};
  return std::nullopt;
}

inline dlns::ScriptedDestroy golden_destroy() { return dlns::ScriptedDestroy({{1, {2}}, {2, {3}}}); }

// Binary instance from explicit tables: each entry is (first, second, row-major table).
struct Fn {
  int first;
  int second;
  std::vector<dlns::Utility> table;
};

inline dlns::Instance build(const std::vector<std::vector<int>>& domains, const std::vector<Fn>& fns) {
  std::vector<dlns::Variable> vars;
  std::vector<int> owners;
  for (std::size_t v = 0; v < domains.size(); ++v) {
    vars.push_back({static_cast<int>(v), domains[v]});
    owners.push_back(static_cast<int>(v));
  }
  std::vector<dlns::BinaryFunction> out;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    auto a = static_cast<dlns::VarIndex>(fns[f].first);
    auto b = static_cast<dlns::VarIndex>(fns[f].second);
    out.emplace_back(static_cast<int>(f), a, b, domains[a].size(), domains[b].size(), fns[f].table);
  }
  return dlns::Instance(std::move(vars), std::move(owners), std::move(out));
}

inline std::vector<bool> mask(const dlns::DestroyFlags& flags) { return dlns::large_neighborhood(flags); }

}  // namespace support
