#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dlns/dbr.hpp"
#include "dlns/errors.hpp"
#include "dlns/instance.hpp"

namespace dlns {

// Independent Bernoulli(p_destroy) flag per agent. The draw depends only on
// (seed, k), so iteration k destroys the same set however the run got there.
inline DestroyFlags destroy_random(std::size_t agents, double p_destroy, std::uint64_t seed, std::size_t k) {
  if (!(p_destroy >= 0.0 && p_destroy <= 1.0)) throw ConfigError("p_destroy must lie in [0, 1]");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32), 0x44u};
  std::mt19937_64 rng(seq);
  std::bernoulli_distribution coin(p_destroy);
  DestroyFlags flags(agents);
  for (auto& f : flags) f = coin(rng) ? DestroyFlag::destroyed : DestroyFlag::preserved;
  return flags;
}

/// Destroys every meeting involved in a violated overlap under `current`.
inline DestroyFlags destroy_domain_knowledge(const Instance& inst, const Assignment& current) {
  if (!inst.meetings()) throw StrategyError("domain-knowledge destroy needs meeting metadata");
  check_shape(inst, current);
  DestroyFlags flags(inst.num_variables(), DestroyFlag::preserved);
  for (const auto& f : inst.functions()) {
    if (!current.bound(f.first()) || !current.bound(f.second())) continue;
    if (f.at(current.at(f.first()), current.at(f.second())).is_neg_inf()) {
      flags[f.first()] = DestroyFlag::destroyed;
      flags[f.second()] = DestroyFlag::destroyed;
    }
  }
  return flags;
}

class DestroyStrategy {
public:
  virtual ~DestroyStrategy() = default;
  virtual std::string name() const = 0;
  virtual DestroyFlags destroy(const Instance& inst, const Assignment& current, std::size_t k) = 0;
};

class RandomDestroy : public DestroyStrategy {
public:
  RandomDestroy(double p_destroy, std::uint64_t seed) : p_(p_destroy), seed_(seed) {}
  std::string name() const override { return "random"; }
  DestroyFlags destroy(const Instance& inst, const Assignment&, std::size_t k) override {
    return destroy_random(inst.num_variables(), p_, seed_, k);
  }

private:
  double p_;
  std::uint64_t seed_;
};

class DomainKnowledgeDestroy : public DestroyStrategy {
public:
  std::string name() const override { return "dk"; }
  DestroyFlags destroy(const Instance& inst, const Assignment& current, std::size_t) override {
    return destroy_domain_knowledge(inst, current);
  }
};

// Fixed preserved sets (variable ids) per iteration; unscripted iterations destroy everything.
class ScriptedDestroy : public DestroyStrategy {
public:
  explicit ScriptedDestroy(std::map<std::size_t, std::vector<int>> preserved_ids) : preserved_(std::move(preserved_ids)) {}
  std::string name() const override { return "scripted"; }
  DestroyFlags destroy(const Instance& inst, const Assignment&, std::size_t k) override {
    DestroyFlags flags(inst.num_variables(), DestroyFlag::destroyed);
    if (auto it = preserved_.find(k); it != preserved_.end()) {
      for (int id : it->second) flags[inst.index_of(id)] = DestroyFlag::preserved;
    }
    return flags;
  }

private:
  std::map<std::size_t, std::vector<int>> preserved_;
};

inline std::unique_ptr<DestroyStrategy> make_destroy(const std::string& name, double p_destroy, std::uint64_t seed) {
  if (name == "random") return std::make_unique<RandomDestroy>(p_destroy, seed);
  if (name == "dk") return std::make_unique<DomainKnowledgeDestroy>();
  throw ConfigError("unknown destroy strategy '" + name + "'");
}

}  // namespace dlns
