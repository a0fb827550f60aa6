#include "cfo/netsim.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "cfo/bp.hpp"
#include "cfo/errors.hpp"
#include "cfo/lsbp.hpp"
#include "cfo/oracle.hpp"

namespace cfo {

LossyChannel::LossyChannel(const NetworkModel& model, std::uint64_t loss_seed)
    : model_(model),
      loss_rng_(make_rng(derive_seed(loss_seed, "delivery"))),
      skip_rng_(make_rng(derive_seed(loss_seed, "skip"))) {}

bool LossyChannel::skips(AgentId) {
  if (model_.delay != DelayMode::RandomSkip || model_.skip_prob <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(skip_rng_) < model_.skip_prob;
}

bool LossyChannel::deliver(AgentId, AgentId) {
  if (model_.pdr >= 1.0) return true;
  if (model_.pdr <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(loss_rng_) < model_.pdr;
}

Graph build_topology(const ExperimentConfig& c) {
  switch (c.topology) {
    case TopologyKind::Inline: {
      Graph g = Graph::with_agents(c.num_agents, 1);
      try {
        g.set_reference(c.reference_id);
        for (const Edge& e : c.edges) g.add_edge(e.lo, e.hi);
        for (const auto& [id, p] : c.positions) g.set_position(id, p);
      } catch (const InvalidArgument& e) {
        throw ValidationError(std::string("topology: ") + e.what());
      }
      return g;
    }
    case TopologyKind::RandomGeometric: {
      GeometricParams p = c.rgg;
      p.seed = c.topology_stream_seed();
      try {
        return random_geometric(p);
      } catch (const InvalidArgument& e) {
        throw ValidationError(std::string("topology: ") + e.what());
      }
    }
    case TopologyKind::File: {
      std::ifstream in(c.graph_file);
      if (!in) throw ValidationError("cannot open graph_file '" + c.graph_file + "'");
      return read_edge_list(in);
    }
  }
  throw ValidationError("unknown topology kind");
}

Scenario build_scenario(const ExperimentConfig& c, std::size_t trial) {
  Scenario s;
  s.graph = build_topology(c);
  if (!c.truth_file.empty()) {
    std::ifstream in(c.truth_file);
    if (!in) throw ValidationError("cannot open truth_file '" + c.truth_file + "'");
    s.truth = read_truth_csv(in, s.graph.reference());
    for (AgentId id : s.graph.agents()) {
      if (!s.truth.offsets.contains(id)) {
        throw ValidationError("truth_file has no offset for agent " + std::to_string(id));
      }
    }
  } else {
    s.truth = generate_truth(s.graph, c.max_offset, c.truth_stream_seed());
  }
  if (!c.measurements_file.empty()) {
    std::ifstream in(c.measurements_file);
    if (!in) throw ValidationError("cannot open measurements_file '" + c.measurements_file + "'");
    s.measurements = read_measurements_csv(in);
    for (const Edge& e : s.graph.edges()) {
      if (!s.measurements.find(e.lo, e.hi)) {
        throw ValidationError("measurements_file misses edge " + std::to_string(e.lo) + "-" +
                              std::to_string(e.hi));
      }
    }
    if (s.measurements.size() != s.graph.num_edges()) {
      throw ValidationError("measurements_file has rows for non-edges");
    }
  } else {
    s.measurements = generate_measurements(s.graph, s.truth, c.noise, c.noise_stream_seed(trial));
  }
  return s;
}

namespace {

double join_radius(const ExperimentConfig& c) { return c.join_radius.value_or(c.rgg.radius); }

Position join_position(const TimelineEvent& ev, const Graph& initial) {
  if (ev.position) return *ev.position;
  if (!initial.has_agent(ev.agent) || !initial.position(ev.agent)) {
    throw ValidationError("timeline: join @" + std::to_string(ev.agent) +
                          " needs an initially positioned agent");
  }
  return *initial.position(ev.agent);
}

}  // namespace

void validate_timeline(const ExperimentConfig& c, const Graph& initial) {
  Graph g = initial;
  std::size_t last = 0;
  for (const TimelineEvent& ev : c.timeline) {
    if (ev.iteration < last) throw ValidationError("timeline: iterations must be non-decreasing");
    last = ev.iteration;
    if (ev.kind == TimelineEvent::Kind::Leave) {
      if (ev.agent == g.reference()) {
        throw ValidationError("timeline: the reference agent " + std::to_string(ev.agent) +
                              " cannot leave");
      }
      if (!g.has_agent(ev.agent)) {
        throw ValidationError("timeline: leave targets unknown agent " + std::to_string(ev.agent));
      }
      g = g.remove_agent(ev.agent);
    } else {
      g = g.add_agent(join_position(ev, initial), join_radius(c)).first;
    }
  }
}

namespace {

// One Monte-Carlo trial stepping through the experiment.
class TrialRun {
 public:
  TrialRun(const ExperimentConfig& c, std::size_t trial, const Scenario& scenario)
      : config_(c),
        initial_graph_(scenario.graph),
        graph_(scenario.graph),
        truth_(scenario.truth),
        measurements_(scenario.measurements),
        channel_(c.network, c.loss_stream_seed(trial)),
        schedule_rng_(make_rng(c.schedule_stream_seed(trial))),
        join_noise_rng_(make_rng(derive_seed(c.noise_stream_seed(trial), "join"))) {
    const double ref_mean = truth_.reference_value();
    if (c.algorithm == Algorithm::Bp) {
      bp_.emplace(graph_, measurements_,
                  BpOptions{c.reference_precision, ref_mean, c.divergence_guard});
    } else {
      lsbp_.emplace(graph_, measurements_, LsbpOptions{c.reference_precision, ref_mean, c.init});
    }
    for (const auto& ev : c.timeline) last_event_ = std::max(last_event_, ev.iteration);
    prev_ = beliefs();
  }

  BeliefSnapshot beliefs() const { return bp_ ? bp_->beliefs() : lsbp_->beliefs(); }

  std::map<AgentId, std::optional<double>> estimates() const {
    return bp_ ? bp_->estimates() : lsbp_->estimates();
  }

  double mse() const {
    std::map<AgentId, std::optional<double>> est = estimates();
    est.erase(graph_.reference());
    try {
      return avg_mse(est, truth_.offsets, config_.mse_normalization_b).value;
    } catch (const UndefinedMetric&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

  // Round l broadcasts b^(l-1); events stamped l-1 are already in place.
  IterationCounters step(std::size_t l) {
    IterationCounters counters;
    if (bp_) {
      counters = bp_->iterate(channel_);
    } else {
      counters = lsbp_->round(channel_, config_.schedule, &schedule_rng_);
    }
    BeliefSnapshot cur = beliefs();
    if (!converged_at_ && l > last_event_ &&
        snapshots_settled(prev_, cur, config_.mean_tol, config_.prec_tol)) {
      converged_at_ = l;
    }
    prev_ = std::move(cur);
    return counters;
  }

  bool done() const { return diverged() || converged_at_.has_value(); }
  bool diverged() const { return bp_ && bp_->diverged(); }
  std::optional<std::size_t> converged_at() const { return converged_at_; }
  const Graph& graph() const { return graph_; }
  const MeasurementSet& measurements() const { return measurements_; }
  const GroundTruth& truth() const { return truth_; }
  const BeliefSnapshot& snapshot() const { return prev_; }

  // Applied once record l has been taken.
  void apply_events(std::size_t l) {
    bool changed = false;
    for (const TimelineEvent& ev : config_.timeline) {
      if (ev.iteration != l) continue;
      changed = true;
      if (ev.kind == TimelineEvent::Kind::Leave) {
        graph_ = graph_.remove_agent(ev.agent);
        measurements_.erase_incident(ev.agent);
        truth_.offsets.erase(ev.agent);
      } else {
        auto [g, id] = graph_.add_agent(join_position(ev, initial_graph_), join_radius(config_));
        graph_ = std::move(g);
        truth_.offsets[id] =
            draw_offset(config_.max_offset, derive_seed(config_.truth_stream_seed(), "join", id));
        for (AgentId n : graph_.neighbors(id)) {
          measurements_.insert(draw_measurement(Edge{id, n}, truth_, config_.noise, join_noise_rng_));
        }
      }
    }
    if (!changed) return;
    if (bp_) {
      bp_->set_topology(graph_, measurements_);
    } else {
      lsbp_->set_topology(graph_, measurements_);
    }
    prev_ = beliefs();
  }

 private:
  const ExperimentConfig& config_;
  Graph initial_graph_;
  Graph graph_;
  GroundTruth truth_;
  MeasurementSet measurements_;
  LossyChannel channel_;
  Rng schedule_rng_;
  Rng join_noise_rng_;
  std::optional<BpState> bp_;
  std::optional<LsbpNetwork> lsbp_;
  BeliefSnapshot prev_;
  std::optional<std::size_t> converged_at_;
  std::size_t last_event_ = 0;
};

std::vector<AgentSample> samples(const BeliefSnapshot& snap) {
  std::vector<AgentSample> out;
  out.reserve(snap.size());
  for (const auto& [id, b] : snap) {
    out.push_back(AgentSample{id, b.is_flat() ? std::numeric_limits<double>::quiet_NaN() : b.mean(),
                              b.variance()});
  }
  return out;
}

}  // namespace

OracleColumns compute_oracle(const Graph& g, const MeasurementSet& measurements,
                             double reference_value, double reference_precision,
                             double normalization_b) {
  OracleColumns out;
  const LinearSystem sys = build_linear_system(g, measurements, reference_value);
  out.wls = wls_solve(sys);
  out.crlb = crlb(sys);
  out.crlb_avg = out.crlb.empty() ? 0.0 : average(out.crlb) / (normalization_b * normalization_b);
  const std::vector<double> zeros(g.non_reference_agents().size(), 0.0);
  const auto p_star = variance_fixed_point(g, measurements, zeros, reference_precision);
  const auto fp = build_fixed_point_system(g, measurements, p_star, reference_value,
                                           reference_precision);
  out.rho_k = spectral_radius(fp.K);
  return out;
}

RunTrace run_experiment(const ExperimentConfig& config) {
  check_config_values(config);
  const std::size_t trials = config.monte_carlo_trials;

  std::vector<std::unique_ptr<TrialRun>> runs;
  runs.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Scenario s = build_scenario(config, t);
    if (t == 0) validate_timeline(config, s.graph);
    runs.push_back(std::make_unique<TrialRun>(config, t, s));
  }

  RunTrace trace;
  trace.algorithm = config.algorithm;

  auto record = [&](std::size_t l, const IterationCounters& counters) {
    IterationRecord rec;
    rec.iteration = l;
    rec.agents = samples(runs.front()->snapshot());
    rec.counters = counters;
    double sum = 0.0;
    for (const auto& r : runs) sum += r->mse();
    rec.avg_mse = sum / static_cast<double>(trials);
    trace.records.push_back(std::move(rec));
  };

  record(0, IterationCounters{});
  for (auto& r : runs) r->apply_events(0);
  for (std::size_t l = 1; l <= config.l_max; ++l) {
    IterationCounters first;
    for (std::size_t t = 0; t < trials; ++t) {
      const IterationCounters c = runs[t]->step(l);
      if (t == 0) first = c;
    }
    record(l, first);
    for (auto& r : runs) r->apply_events(l);
    bool all_done = true;
    bool any_diverged = false;
    for (const auto& r : runs) {
      all_done = all_done && r->done();
      any_diverged = any_diverged || r->diverged();
    }
    if (any_diverged || all_done) break;
  }

  bool all_converged = true;
  std::size_t latest = 0;
  for (const auto& r : runs) {
    trace.trial_converged_at.push_back(r->converged_at());
    trace.diverged = trace.diverged || r->diverged();
    if (r->converged_at()) {
      latest = std::max(latest, *r->converged_at());
    } else {
      all_converged = false;
    }
  }
  if (all_converged) trace.converged_at = latest;

  const TrialRun& lead = *runs.front();
  for (const auto& [id, est] : lead.estimates()) {
    if (est) {
      trace.estimates[id] = *est;
    } else {
      ++trace.excluded_agents;
    }
  }
  if (config.oracle) {
    trace.oracle = compute_oracle(lead.graph(), lead.measurements(), lead.truth().reference_value(),
                                  config.reference_precision, config.mse_normalization_b);
  }
  return trace;
}

}  // namespace cfo
