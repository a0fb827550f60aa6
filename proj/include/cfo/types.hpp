#pragma once

#include <compare>
#include <cstdint>
#include <utility>

namespace cfo {

using AgentId = std::uint32_t;

// Unordered agent pair, stored with lo < hi.
struct Edge {
  AgentId lo = 0;
  AgentId hi = 0;

  Edge() = default;
  Edge(AgentId a, AgentId b) : lo(a < b ? a : b), hi(a < b ? b : a) {}

  bool touches(AgentId i) const noexcept { return lo == i || hi == i; }
  AgentId other(AgentId i) const noexcept { return i == lo ? hi : lo; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

}  // namespace cfo
