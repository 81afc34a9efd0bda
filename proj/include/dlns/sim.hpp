#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "dlns/errors.hpp"
#include "dlns/instance.hpp"
#include "dlns/utility.hpp"

namespace dlns {

// Agents are addressed by the dense index of the variable they own.
using AgentIndex = std::size_t;

enum class MessageKind : std::uint8_t { util = 0, value = 1, bounds = 2 };
inline constexpr std::size_t kMessageKinds = 3;

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::util: return "UTIL";
    case MessageKind::value: return "VALUE";
    case MessageKind::bounds: return "BOUNDS";
  }
  return "?";
}

// Two utility tables, one per relaxed problem. For T-DBR each is indexed by
// the receiver's value; for DPOP-DBR by the sender's separator assignment.
struct UtilPayload {
  std::vector<Utility> check;
  std::vector<Utility> hat;
};

struct ValueEntry {
  VarIndex var = 0;
  int check = kUnbound;
  int hat = kUnbound;
};

struct ValuePayload {
  std::vector<ValueEntry> entries;
};

struct BoundsPayload {
  Utility lb;
  Utility ub;
};

using Payload = std::variant<UtilPayload, ValuePayload, BoundsPayload>;

class Message {
public:
  Message(AgentIndex sender, AgentIndex receiver, Payload payload)
      : sender_(sender), receiver_(receiver), payload_(std::move(payload)) {}

  AgentIndex sender() const noexcept { return sender_; }
  AgentIndex receiver() const noexcept { return receiver_; }
  const Payload& payload() const noexcept { return payload_; }
  MessageKind kind() const noexcept { return static_cast<MessageKind>(payload_.index()); }

  // Number of scalar entries carried.
  std::size_t size() const noexcept {
    return std::visit(
        [](const auto& p) -> std::size_t {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, UtilPayload>) {
            return p.check.size() + p.hat.size();
          } else if constexpr (std::is_same_v<P, ValuePayload>) {
            return 2 * p.entries.size();
          } else {
            return 2;
          }
        },
        payload_);
  }

  // Length of the causal chain of messages this one ends, within its phase.
  std::size_t hop() const noexcept { return hop_; }

  template <class P>
  const P& as() const {
    return std::get<P>(payload_);
  }

private:
  friend class Network;
  AgentIndex sender_;
  AgentIndex receiver_;
  Payload payload_;
  std::size_t hop_ = 0;
};

struct ClockConfig {
  double t_cc = 1.0;     // cost of one constraint check
  double t_msg = 100.0;  // latency of one message hop
};

/// Phase clock: the slowest agent's compute plus one latency per sequential hop.
inline double simulated_clock_advance(std::span<const std::uint64_t> checks_per_agent, std::size_t hops,
                                      const ClockConfig& clock = {}) {
  std::uint64_t worst = 0;
  for (auto c : checks_per_agent) worst = std::max(worst, c);
  return static_cast<double>(worst) * clock.t_cc + static_cast<double>(hops) * clock.t_msg;
}

struct Metrics {
  std::array<std::uint64_t, kMessageKinds> messages_by_kind{};
  std::uint64_t total_payload = 0;
  std::uint64_t max_payload = 0;
  std::vector<std::uint64_t> constraint_checks_per_agent;
  std::size_t hops = 0;
  double simulated_time = 0.0;
  double wall_time_ms = 0.0;

  std::uint64_t messages() const noexcept {
    std::uint64_t n = 0;
    for (auto m : messages_by_kind) n += m;
    return n;
  }

  std::uint64_t messages(MessageKind k) const noexcept { return messages_by_kind[static_cast<std::size_t>(k)]; }

  std::uint64_t constraint_checks() const noexcept {
    std::uint64_t n = 0;
    for (auto c : constraint_checks_per_agent) n += c;
    return n;
  }

  std::uint64_t max_agent_checks() const noexcept {
    std::uint64_t n = 0;
    for (auto c : constraint_checks_per_agent) n = std::max(n, c);
    return n;
  }

  Metrics& operator+=(const Metrics& o) {
    for (std::size_t k = 0; k < kMessageKinds; ++k) messages_by_kind[k] += o.messages_by_kind[k];
    total_payload += o.total_payload;
    max_payload = std::max(max_payload, o.max_payload);
    if (constraint_checks_per_agent.size() < o.constraint_checks_per_agent.size()) {
      constraint_checks_per_agent.resize(o.constraint_checks_per_agent.size(), 0);
    }
    for (std::size_t a = 0; a < o.constraint_checks_per_agent.size(); ++a) {
      constraint_checks_per_agent[a] += o.constraint_checks_per_agent[a];
    }
    hops += o.hops;
    simulated_time += o.simulated_time;
    wall_time_ms += o.wall_time_ms;
    return *this;
  }
};

/// What an agent's handler sees during one scheduler round.
class AgentContext {
public:
  AgentIndex self() const noexcept { return self_; }
  std::span<const Message> inbox() const noexcept { return inbox_; }
  bool first_round() const noexcept { return round_ == 0; }

  void send(AgentIndex to, Payload payload) { outbox_.emplace_back(self_, to, std::move(payload)); }
  void count_checks(std::uint64_t n) noexcept { checks_ += n; }

private:
  friend class Network;
  AgentIndex self_ = 0;
  std::size_t round_ = 0;
  std::span<const Message> inbox_;
  std::vector<Message> outbox_;
  std::uint64_t checks_ = 0;
};

/// Deterministic synchronous message-passing network.
///
/// A phase runs in rounds. Round 0 calls every agent's handler with an empty
/// inbox; later rounds call only agents with mail, in ascending agent order,
/// with their inbox sorted by sender. The phase ends when no message is in
/// flight.
class Network {
public:
  explicit Network(std::size_t agents, ClockConfig clock = {}) : agents_(agents), clock_(clock) {}

  std::size_t agents() const noexcept { return agents_; }
  const ClockConfig& clock() const noexcept { return clock_; }

  // Cumulative over all phases; equal per kind when delivery is exactly-once.
  const std::array<std::uint64_t, kMessageKinds>& sent() const noexcept { return sent_; }
  const std::array<std::uint64_t, kMessageKinds>& received() const noexcept { return received_; }

  template <class Handler>
  Metrics run_phase(Handler&& handler) {
    Metrics m;
    m.constraint_checks_per_agent.assign(agents_, 0);
    std::vector<std::size_t> agent_hop(agents_, 0);
    std::vector<std::vector<Message>> inboxes(agents_);
    const std::size_t round_limit = 4 * agents_ + 16;

    for (std::size_t round = 0;; ++round) {
      if (round > round_limit) throw HarnessError("phase did not quiesce within " + std::to_string(round_limit) + " rounds");
      std::vector<Message> in_flight;
      for (AgentIndex a = 0; a < agents_; ++a) {
        if (round > 0 && inboxes[a].empty()) continue;
        AgentContext ctx;
        ctx.self_ = a;
        ctx.round_ = round;
        ctx.inbox_ = inboxes[a];
        for (const auto& msg : inboxes[a]) {
          agent_hop[a] = std::max(agent_hop[a], msg.hop_);
          ++received_[static_cast<std::size_t>(msg.kind())];
        }
        handler(ctx);
        m.constraint_checks_per_agent[a] += ctx.checks_;
        for (auto& msg : ctx.outbox_) {
          if (msg.receiver_ >= agents_) {
            throw HarnessError("agent " + std::to_string(a) + " sent a " + to_string(msg.kind()) +
                               " message to unknown agent " + std::to_string(msg.receiver_));
          }
          msg.hop_ = agent_hop[a] + 1;
          m.hops = std::max(m.hops, msg.hop_);
          std::size_t size = msg.size();
          ++m.messages_by_kind[static_cast<std::size_t>(msg.kind())];
          ++sent_[static_cast<std::size_t>(msg.kind())];
          m.total_payload += size;
          m.max_payload = std::max<std::uint64_t>(m.max_payload, size);
          in_flight.push_back(std::move(msg));
        }
      }
      for (auto& box : inboxes) box.clear();
      if (in_flight.empty()) break;
      std::stable_sort(in_flight.begin(), in_flight.end(),
                       [](const Message& x, const Message& y) { return x.sender_ < y.sender_; });
      for (auto& msg : in_flight) inboxes[msg.receiver_].push_back(std::move(msg));
    }
    m.simulated_time = simulated_clock_advance(m.constraint_checks_per_agent, m.hops, clock_);
    return m;
  }

private:
  std::size_t agents_;
  ClockConfig clock_;
  std::array<std::uint64_t, kMessageKinds> sent_{};
  std::array<std::uint64_t, kMessageKinds> received_{};
};

}  // namespace dlns
