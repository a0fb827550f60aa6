#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cfo/channel.hpp"
#include "cfo/gaussian.hpp"
#include "cfo/graph.hpp"
#include "cfo/model.hpp"
#include "cfo/rng.hpp"

namespace cfo {

enum class InitMode { ZeroPrecision, UniformVariance };

// Starting belief for every non-reference agent. Zero precision is always
// feasible; a uniform variance P0 > 0 reproduces the variance sweeps.
struct FeasibleInit {
  InitMode mode = InitMode::ZeroPrecision;
  double variance = 1.0;  // P0, Hz^2 (UniformVariance only)
  double mean = 0.0;      // mu0, Hz

  InfoGaussian belief() const;
};

struct LsbpOptions {
  double reference_precision = 1e12;
  double reference_mean = 0.0;
  FeasibleInit init;
};

enum class Schedule { Synchronous, Asynchronous };

struct InboxEntry {
  InfoGaussian belief;
  std::size_t stamp = 0;  // iteration of receipt; 0 for the declared initial value
};

struct LsbpAgentState {
  InfoGaussian belief;
  std::map<AgentId, InboxEntry> inbox;  // keyed by current neighbours only
};

// Message j -> i rebuilt at i from j's cached broadcast belief.
InfoGaussian lsbp_incoming(const InfoGaussian& cached, const Measurement& m);

// Product of the incoming messages over every inbox entry of agent i.
InfoGaussian lsbp_update_belief(AgentId i, const LsbpAgentState& state,
                                const MeasurementSet& measurements);

// Broadcast-based BP: each agent sends its whole belief once per iteration and
// every receiver forms its own incoming message from it.
class LsbpNetwork {
 public:
  LsbpNetwork(Graph graph, MeasurementSet measurements, LsbpOptions options = {});

  const Graph& graph() const noexcept { return graph_; }
  const MeasurementSet& measurements() const noexcept { return measurements_; }
  const LsbpOptions& options() const noexcept { return options_; }
  std::size_t iteration() const noexcept { return iteration_; }

  const LsbpAgentState& agent(AgentId i) const;
  InfoGaussian belief(AgentId i) const { return agent(i).belief; }
  std::map<AgentId, InfoGaussian> beliefs() const;
  std::map<AgentId, std::optional<double>> estimates() const;
  // Non-reference agents with no neighbours at all.
  std::vector<AgentId> unobservable() const;

  // Synchronous: all agents broadcast, then all update from the inbox
  // snapshot. Asynchronous: agents update-then-broadcast one at a time in a
  // permutation drawn from `schedule_rng`.
  IterationCounters round(Channel& channel, Schedule schedule = Schedule::Synchronous,
                          Rng* schedule_rng = nullptr);
  IterationCounters round();

  // Apply a topology change between rounds. Departed agents are purged from
  // every inbox; new agents start from the configured init.
  void set_topology(Graph graph, MeasurementSet measurements);

 private:
  InfoGaussian pinned() const;
  InfoGaussian declared_belief(AgentId j) const;
  IterationCounters broadcast(AgentId j, Channel& channel);

  Graph graph_;
  MeasurementSet measurements_;
  LsbpOptions options_;
  std::map<AgentId, LsbpAgentState> agents_;
  std::size_t iteration_ = 0;
};

// One application of the variance recursion on precisions. `precisions` is
// ordered like g.non_reference_agents(); the reference precision is fixed.
std::vector<double> variance_map(const Graph& g, const MeasurementSet& measurements,
                                 std::span<const double> precisions,
                                 double reference_precision = 1e12);

// F(p0) - p0 is elementwise >= 0 or elementwise <= 0.
bool is_feasible_init(const Graph& g, const MeasurementSet& measurements,
                      std::span<const double> p0, double reference_precision = 1e12);

// Iterates variance_map from p0 until the largest relative change is below
// rel_tol. Throws NumericFailure if max_iterations is exceeded.
std::vector<double> variance_fixed_point(const Graph& g, const MeasurementSet& measurements,
                                         std::span<const double> p0,
                                         double reference_precision = 1e12,
                                         double rel_tol = 1e-15,
                                         std::size_t max_iterations = 100000);

using BeliefSnapshot = std::map<AgentId, InfoGaussian>;

// Start of the trailing stretch of the trace in which every agent moves by
// less than mean_tol in mean and prec_tol in precision per step; searched over
// l >= max(first, 1). Agents absent from l-1, or switching between flat and
// informative, count as moved.
std::optional<std::size_t> detect_convergence(std::span<const BeliefSnapshot> trace,
                                              double mean_tol = 1e-9, double prec_tol = 1e-12,
                                              std::size_t first = 1);

// Convergence test for one pair of consecutive snapshots.
bool snapshots_settled(const BeliefSnapshot& prev, const BeliefSnapshot& cur, double mean_tol,
                       double prec_tol);

}  // namespace cfo
