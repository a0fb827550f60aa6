#pragma once

#include <map>
#include <optional>

#include "cfo/channel.hpp"
#include "cfo/gaussian.hpp"
#include "cfo/graph.hpp"
#include "cfo/model.hpp"

namespace cfo {

struct BpOptions {
  double reference_precision = 1e12;  // 1/Hz^2, pin on the reference belief
  double reference_mean = 0.0;        // known f_ref, Hz
  double divergence_guard = 1e12;     // |mean| above this marks the run diverged
};

// Standard Gaussian BP with one message per edge direction. Each agent keeps
// the last message it received from every neighbour; all start flat.
class BpState {
 public:
  BpState(Graph graph, MeasurementSet measurements, BpOptions options = {});

  const Graph& graph() const noexcept { return graph_; }
  const MeasurementSet& measurements() const noexcept { return measurements_; }
  const BpOptions& options() const noexcept { return options_; }
  std::size_t iteration() const noexcept { return iteration_; }
  bool diverged() const noexcept { return diverged_; }

  // Last m_{from->to} held by `to`.
  InfoGaussian received(AgentId from, AgentId to) const;
  void set_received(AgentId from, AgentId to, const InfoGaussian& m);

  // Outgoing message j -> i computed from j's current cache.
  InfoGaussian compute_message(AgentId j, AgentId i) const;
  // Product of incoming messages; pinned at the reference.
  InfoGaussian belief(AgentId i) const;

  // One synchronous round: every directed message is computed from the
  // previous round's caches, then delivered through `channel`.
  IterationCounters iterate(Channel& channel);
  IterationCounters iterate();

  // Belief means; nullopt where the belief is still flat.
  std::map<AgentId, std::optional<double>> estimates() const;
  std::map<AgentId, InfoGaussian> beliefs() const;

  // Swap in a new topology between rounds. Caches on surviving directed edges
  // are kept; new edges start flat.
  void set_topology(Graph graph, MeasurementSet measurements);

 private:
  InfoGaussian pinned() const;
  void check_divergence();

  Graph graph_;
  MeasurementSet measurements_;
  BpOptions options_;
  // inbox_[i][j] = m_{j->i}
  std::map<AgentId, std::map<AgentId, InfoGaussian>> inbox_;
  std::size_t iteration_ = 0;
  bool diverged_ = false;
};

}  // namespace cfo
