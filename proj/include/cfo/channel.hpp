#pragma once

#include <cstdint>

#include "cfo/types.hpp"

namespace cfo {

// Message accounting for one iteration.
struct IterationCounters {
  std::uint64_t broadcasts = 0;      // LSBP: one per transmitting agent
  std::uint64_t point_to_point = 0;  // BP: one per directed edge message
  std::uint64_t deliveries = 0;
  std::uint64_t drops = 0;

  IterationCounters& operator+=(const IterationCounters& o) {
    broadcasts += o.broadcasts;
    point_to_point += o.point_to_point;
    deliveries += o.deliveries;
    drops += o.drops;
    return *this;
  }
  friend bool operator==(const IterationCounters&, const IterationCounters&) = default;
};

// Link layer seen by the message-passing rounds.
class Channel {
 public:
  virtual ~Channel() = default;
  // Called once per agent per iteration, before it transmits.
  virtual bool skips(AgentId /*agent*/) { return false; }
  // Called once per (sender, receiver) reception.
  virtual bool deliver(AgentId from, AgentId to) = 0;
};

class PerfectChannel final : public Channel {
 public:
  bool deliver(AgentId, AgentId) override { return true; }
};

}  // namespace cfo
