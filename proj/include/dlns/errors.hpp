#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlns {

// Malformed instance, unknown id, or value outside a domain.
class StructuralError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solver or table would exceed its configured size limit.
class CapacityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance file could not be parsed; the message names the line or field.
class ParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Destroy strategy cannot operate on the given instance.
class StrategyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Message addressed to an agent the network does not know.
class HarnessError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure inside a D-LNS run, tagged with the iteration it happened in.
class RunError : public std::runtime_error {
public:
  RunError(std::size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

}  // namespace dlns
