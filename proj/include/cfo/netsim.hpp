#pragma once

#include <cstdint>
#include <optional>

#include "cfo/channel.hpp"
#include "cfo/config.hpp"
#include "cfo/graph.hpp"
#include "cfo/metrics.hpp"
#include "cfo/model.hpp"
#include "cfo/rng.hpp"

namespace cfo {

// Independent Bernoulli(pdr) per (sender, receiver, iteration) reception, plus
// optional random one-iteration broadcast skips.
class LossyChannel final : public Channel {
 public:
  LossyChannel(const NetworkModel& model, std::uint64_t loss_seed);

  bool skips(AgentId agent) override;
  bool deliver(AgentId from, AgentId to) override;

 private:
  NetworkModel model_;
  Rng loss_rng_;
  Rng skip_rng_;
};

// Initial topology, truth and the trial's measurements as a run sees them.
struct Scenario {
  Graph graph;
  GroundTruth truth;
  MeasurementSet measurements;
};

Graph build_topology(const ExperimentConfig& c);
// Loads or generates truth and measurements for `trial`.
Scenario build_scenario(const ExperimentConfig& c, std::size_t trial = 0);

// Replays the timeline on the initial graph and rejects events that target
// missing agents, the reference, or positions that cannot be resolved.
void validate_timeline(const ExperimentConfig& c, const Graph& initial);

// Full run: timeline events, broadcast under loss/skips, BP or LSBP update,
// metrics; stops when every trial has converged after the last event, BP
// diverges, or l_max is reached. Throws ValidationError before starting if
// the config is inconsistent.
RunTrace run_experiment(const ExperimentConfig& config);

// Oracle columns (WLS, CRLB, rho(K)) for a topology and measurement set.
OracleColumns compute_oracle(const Graph& g, const MeasurementSet& measurements,
                             double reference_value, double reference_precision,
                             double normalization_b);

}  // namespace cfo
