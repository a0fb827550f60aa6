#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cfo/types.hpp"

namespace cfo {

// Bad input to an operation: unknown agent id, removing the reference, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Config or timeline rejected before a run starts.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconsistentState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Some agents are not anchored to the reference, so the normal equations are
// singular.
class UnobservableSystem : public std::runtime_error {
 public:
  UnobservableSystem(std::vector<AgentId> agents)
      : std::runtime_error(describe(agents)), agents_(std::move(agents)) {}

  const std::vector<AgentId>& agents() const noexcept { return agents_; }

 private:
  static std::string describe(const std::vector<AgentId>& agents) {
    std::string msg = "unobservable agents:";
    for (AgentId a : agents) msg += " " + std::to_string(a);
    return msg;
  }

  std::vector<AgentId> agents_;
};

}  // namespace cfo
