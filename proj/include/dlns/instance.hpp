#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dlns/errors.hpp"
#include "dlns/utility.hpp"

namespace dlns {

// Dense position of a variable (equivalently, of its owning agent).
using VarIndex = std::size_t;
// Dense position of a function in Instance::functions().
using FuncIndex = std::size_t;

inline constexpr int kUnbound = -1;

struct Variable {
  int id = 0;
  std::vector<int> domain;
};

/// Binary utility function over an unordered pair of variables.
///
/// The table is stored row-major over (first domain index, second domain
/// index). Lookups through at_from() take the caller's variable first, so the
/// order in which the scope is written never matters.
class BinaryFunction {
public:
  BinaryFunction(int id, VarIndex first, VarIndex second, std::size_t rows, std::size_t cols,
                 std::vector<Utility> table)
      : id_(id), first_(first), second_(second), rows_(rows), cols_(cols), table_(std::move(table)) {
    if (first_ == second_) {
      throw StructuralError("function " + std::to_string(id_) + ": scope needs two distinct variables");
    }
    if (table_.size() != rows_ * cols_) {
      throw StructuralError("function " + std::to_string(id_) + ": table is not total over the domains");
    }
    for (Utility u : table_) max_ = max(max_, u);
  }

  int id() const noexcept { return id_; }
  VarIndex first() const noexcept { return first_; }
  VarIndex second() const noexcept { return second_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const Utility> table() const noexcept { return table_; }

  bool involves(VarIndex v) const noexcept { return v == first_ || v == second_; }
  VarIndex other(VarIndex v) const noexcept { return v == first_ ? second_ : first_; }

  Utility at(std::size_t i_first, std::size_t j_second) const noexcept {
    return table_[i_first * cols_ + j_second];
  }

  // `own` indexes the domain of `var`, `other` the domain of the remaining scope member.
  Utility at_from(VarIndex var, std::size_t own, std::size_t other) const noexcept {
    return var == first_ ? at(own, other) : at(other, own);
  }

  // Largest table entry (NEG_INF only if every entry is NEG_INF).
  Utility max_entry() const noexcept { return max_; }

private:
  int id_;
  VarIndex first_;
  VarIndex second_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Utility> table_;
  Utility max_ = kNegInf;
};

// Meeting-scheduling metadata attached to one variable.
struct Meeting {
  int duration = 1;
  std::vector<int> participants;
};

/// A DCOP <X, D, F, A, alpha> restricted to binary functions and one
/// variable per agent. Immutable after construction.
class Instance {
public:
  Instance() = default;

  // owners[v] is the id of the agent controlling variable v.
  Instance(std::vector<Variable> variables, std::vector<int> owners, std::vector<BinaryFunction> functions)
      : variables_(std::move(variables)), owners_(std::move(owners)), functions_(std::move(functions)) {
    validate();
    index();
  }

  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_functions() const noexcept { return functions_.size(); }

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& variable(VarIndex v) const { return variables_.at(v); }
  const std::vector<BinaryFunction>& functions() const noexcept { return functions_; }
  const BinaryFunction& function(FuncIndex f) const { return functions_.at(f); }

  std::size_t domain_size(VarIndex v) const { return variables_.at(v).domain.size(); }
  std::size_t max_domain_size() const noexcept {
    std::size_t d = 0;
    for (const auto& var : variables_) d = std::max(d, var.domain.size());
    return d;
  }

  int value_at(VarIndex v, std::size_t idx) const { return variables_.at(v).domain.at(idx); }

  VarIndex index_of(int var_id) const {
    auto it = var_index_.find(var_id);
    if (it == var_index_.end()) throw StructuralError("unknown variable id " + std::to_string(var_id));
    return it->second;
  }

  // Domain position of `value` for variable v.
  std::size_t domain_index(VarIndex v, int value) const {
    const auto& dom = variable(v).domain;
    auto it = std::find(dom.begin(), dom.end(), value);
    if (it == dom.end()) {
      throw StructuralError("value " + std::to_string(value) + " is outside the domain of variable " +
                            std::to_string(variables_[v].id));
    }
    return static_cast<std::size_t>(it - dom.begin());
  }

  int agent_of(VarIndex v) const { return owners_.at(v); }
  const std::vector<int>& owners() const noexcept { return owners_; }

  VarIndex variable_of_agent(int agent_id) const {
    auto it = agent_index_.find(agent_id);
    if (it == agent_index_.end()) throw StructuralError("unknown agent id " + std::to_string(agent_id));
    return it->second;
  }

  // Functions whose scope contains v, in function order.
  const std::vector<FuncIndex>& incident(VarIndex v) const { return incident_.at(v); }

  // Neighbours of v in the constraint graph, ascending.
  const std::vector<VarIndex>& neighbors_of(VarIndex v) const { return neighbors_.at(v); }

  std::optional<FuncIndex> function_between(VarIndex a, VarIndex b) const {
    auto it = pair_index_.find(pair_key(a, b));
    if (it == pair_index_.end()) return std::nullopt;
    return it->second;
  }

  const std::optional<std::vector<Meeting>>& meetings() const noexcept { return meetings_; }
  void set_meetings(std::vector<Meeting> meetings) {
    if (meetings.size() != variables_.size()) {
      throw StructuralError("meeting metadata must cover every variable");
    }
    meetings_ = std::move(meetings);
  }

  // Compact JSON object describing how the instance was generated (may be empty).
  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string json) { provenance_ = std::move(json); }

private:
  std::size_t pair_key(VarIndex a, VarIndex b) const noexcept {
    if (a > b) std::swap(a, b);
    return a * variables_.size() + b;
  }

  void validate() const {
    if (owners_.size() != variables_.size()) {
      throw StructuralError("every variable needs exactly one owning agent");
    }
    std::set<int> var_ids;
    std::set<int> agent_ids;
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      const auto& var = variables_[v];
      if (!var_ids.insert(var.id).second) throw StructuralError("duplicate variable id " + std::to_string(var.id));
      if (!agent_ids.insert(owners_[v]).second) {
        throw StructuralError("agent " + std::to_string(owners_[v]) + " owns more than one variable");
      }
      if (var.domain.empty()) throw StructuralError("variable " + std::to_string(var.id) + " has an empty domain");
      std::set<int> values(var.domain.begin(), var.domain.end());
      if (values.size() != var.domain.size()) {
        throw StructuralError("variable " + std::to_string(var.id) + " repeats a domain value");
      }
    }
    std::set<int> fn_ids;
    std::set<std::pair<VarIndex, VarIndex>> scopes;
    for (const auto& f : functions_) {
      if (!fn_ids.insert(f.id()).second) throw StructuralError("duplicate function id " + std::to_string(f.id()));
      if (f.first() >= variables_.size() || f.second() >= variables_.size()) {
        throw StructuralError("function " + std::to_string(f.id()) + " references an unknown variable");
      }
      if (f.rows() != variables_[f.first()].domain.size() || f.cols() != variables_[f.second()].domain.size()) {
        throw StructuralError("function " + std::to_string(f.id()) + ": table shape does not match the domains");
      }
      std::pair<VarIndex, VarIndex> key{std::min(f.first(), f.second()), std::max(f.first(), f.second())};
      if (!scopes.insert(key).second) {
        throw StructuralError("more than one function between variables " +
                              std::to_string(variables_[key.first].id) + " and " +
                              std::to_string(variables_[key.second].id));
      }
      for (Utility u : f.table()) {
        if (u.is_finite() && !(u.value() >= 0.0)) {
          throw StructuralError("function " + std::to_string(f.id()) + " has a negative utility");
        }
      }
    }
  }

  void index() {
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      var_index_[variables_[v].id] = v;
      agent_index_[owners_[v]] = v;
    }
    incident_.assign(variables_.size(), {});
    neighbors_.assign(variables_.size(), {});
    for (FuncIndex f = 0; f < functions_.size(); ++f) {
      const auto& fn = functions_[f];
      incident_[fn.first()].push_back(f);
      incident_[fn.second()].push_back(f);
      neighbors_[fn.first()].push_back(fn.second());
      neighbors_[fn.second()].push_back(fn.first());
      pair_index_[pair_key(fn.first(), fn.second())] = f;
    }
    for (auto& n : neighbors_) std::sort(n.begin(), n.end());
  }

  std::vector<Variable> variables_;
  std::vector<int> owners_;
  std::vector<BinaryFunction> functions_;
  std::optional<std::vector<Meeting>> meetings_;
  std::string provenance_;

  std::unordered_map<int, VarIndex> var_index_;
  std::unordered_map<int, VarIndex> agent_index_;
  std::unordered_map<std::size_t, FuncIndex> pair_index_;
  std::vector<std::vector<FuncIndex>> incident_;
  std::vector<std::vector<VarIndex>> neighbors_;
};

/// Partial or complete assignment, stored as domain positions per variable.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : slots_(n, kUnbound) {}

  std::size_t size() const noexcept { return slots_.size(); }
  bool bound(VarIndex v) const { return slots_.at(v) != kUnbound; }
  int index(VarIndex v) const { return slots_.at(v); }
  std::size_t at(VarIndex v) const { return static_cast<std::size_t>(slots_[v]); }
  void set_index(VarIndex v, int idx) { slots_.at(v) = idx; }
  void unbind(VarIndex v) { slots_.at(v) = kUnbound; }

  bool complete() const noexcept {
    return std::none_of(slots_.begin(), slots_.end(), [](int s) { return s == kUnbound; });
  }

  // Binds variable `var_id` to `value`, checking both against the instance.
  void bind(const Instance& inst, int var_id, int value) {
    VarIndex v = inst.index_of(var_id);
    if (slots_.size() != inst.num_variables()) slots_.resize(inst.num_variables(), kUnbound);
    slots_[v] = static_cast<int>(inst.domain_index(v, value));
  }

  std::optional<int> value(const Instance& inst, int var_id) const {
    VarIndex v = inst.index_of(var_id);
    if (v >= slots_.size() || slots_[v] == kUnbound) return std::nullopt;
    return inst.value_at(v, static_cast<std::size_t>(slots_[v]));
  }

  std::span<const int> indices() const noexcept { return slots_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

private:
  std::vector<int> slots_;
};

inline void check_shape(const Instance& inst, const Assignment& a) {
  if (a.size() != inst.num_variables()) {
    throw StructuralError("assignment covers " + std::to_string(a.size()) + " variables, instance has " +
                          std::to_string(inst.num_variables()));
  }
  for (VarIndex v = 0; v < a.size(); ++v) {
    if (a.bound(v) && a.at(v) >= inst.domain_size(v)) {
      throw StructuralError("assignment index outside the domain of variable " +
                            std::to_string(inst.variable(v).id));
    }
  }
}

/// F(sigma): sum over the functions whose scope is fully bound.
inline Utility evaluate_total(const Instance& inst, const Assignment& a) {
  check_shape(inst, a);
  Utility total = 0.0;
  for (const auto& f : inst.functions()) {
    if (a.bound(f.first()) && a.bound(f.second())) total += f.at(a.at(f.first()), a.at(f.second()));
  }
  return total;
}

/// f(v_a, v_b) by domain values; the order of the two variables is irrelevant.
inline Utility evaluate_function(const Instance& inst, const BinaryFunction& f, VarIndex var_a, int value_a,
                                 VarIndex var_b, int value_b) {
  if (!f.involves(var_a) || f.other(var_a) != var_b) {
    throw StructuralError("function " + std::to_string(f.id()) + " is not defined on that pair of variables");
  }
  return f.at_from(var_a, inst.domain_index(var_a, value_a), inst.domain_index(var_b, value_b));
}

// Values given in the function's scope order.
inline Utility evaluate_function(const Instance& inst, const BinaryFunction& f, int value_first,
                                 int value_second) {
  return evaluate_function(inst, f, f.first(), value_first, f.second(), value_second);
}

inline Utility max_pair(const BinaryFunction& f) noexcept { return f.max_entry(); }

/// N(a): agents sharing a function with `agent_id`.
inline std::set<int> neighbors(const Instance& inst, int agent_id) {
  std::set<int> out;
  for (VarIndex u : inst.neighbors_of(inst.variable_of_agent(agent_id))) out.insert(inst.agent_of(u));
  return out;
}

}  // namespace dlns
