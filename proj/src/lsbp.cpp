#include "cfo/lsbp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfo/errors.hpp"

namespace cfo {

InfoGaussian FeasibleInit::belief() const {
  if (mode == InitMode::ZeroPrecision) return InfoGaussian::flat();
  if (!(variance > 0.0)) throw InvalidArgument("uniform initial variance must be positive");
  return InfoGaussian::from_moments(mean, variance);
}

InfoGaussian lsbp_incoming(const InfoGaussian& cached, const Measurement& m) {
  return sum_max_marginal(m.r, m.sigma2, cached);
}

InfoGaussian lsbp_update_belief(AgentId i, const LsbpAgentState& state,
                                const MeasurementSet& measurements) {
  InfoGaussian b;
  for (const auto& [j, entry] : state.inbox) b *= lsbp_incoming(entry.belief, measurements.at(i, j));
  return b;
}

LsbpNetwork::LsbpNetwork(Graph graph, MeasurementSet measurements, LsbpOptions options)
    : options_(options) {
  options_.init.belief();  // validates P0
  set_topology(std::move(graph), std::move(measurements));
}

InfoGaussian LsbpNetwork::pinned() const {
  return InfoGaussian::from_info(options_.reference_precision,
                                 options_.reference_precision * options_.reference_mean);
}

// What a neighbour assumes about j before hearing from it.
InfoGaussian LsbpNetwork::declared_belief(AgentId j) const {
  if (options_.init.mode == InitMode::ZeroPrecision) return InfoGaussian::flat();
  return j == graph_.reference() ? pinned() : options_.init.belief();
}

void LsbpNetwork::set_topology(Graph graph, MeasurementSet measurements) {
  for (const Edge& e : graph.edges()) measurements.at(e.lo, e.hi);
  graph_ = std::move(graph);
  measurements_ = std::move(measurements);

  std::map<AgentId, LsbpAgentState> next;
  for (AgentId i : graph_.agents()) {
    LsbpAgentState state;
    auto old = agents_.find(i);
    if (old != agents_.end()) {
      state.belief = old->second.belief;
    } else {
      state.belief = i == graph_.reference() ? pinned() : options_.init.belief();
    }
    for (AgentId j : graph_.neighbors(i)) {
      if (old != agents_.end()) {
        auto it = old->second.inbox.find(j);
        if (it != old->second.inbox.end()) {
          state.inbox[j] = it->second;
          continue;
        }
      }
      state.inbox[j] = InboxEntry{declared_belief(j), 0};
    }
    next.emplace(i, std::move(state));
  }
  agents_ = std::move(next);
}

const LsbpAgentState& LsbpNetwork::agent(AgentId i) const {
  auto it = agents_.find(i);
  if (it == agents_.end()) throw InvalidArgument("unknown agent " + std::to_string(i));
  return it->second;
}

std::map<AgentId, InfoGaussian> LsbpNetwork::beliefs() const {
  std::map<AgentId, InfoGaussian> out;
  for (const auto& [id, s] : agents_) out[id] = s.belief;
  return out;
}

std::map<AgentId, std::optional<double>> LsbpNetwork::estimates() const {
  std::map<AgentId, std::optional<double>> out;
  for (const auto& [id, s] : agents_) {
    out[id] = s.belief.is_flat() ? std::nullopt : std::optional<double>(s.belief.mean());
  }
  return out;
}

std::vector<AgentId> LsbpNetwork::unobservable() const {
  std::vector<AgentId> out;
  for (const auto& [id, s] : agents_) {
    if (id != graph_.reference() && s.inbox.empty()) out.push_back(id);
  }
  return out;
}

IterationCounters LsbpNetwork::broadcast(AgentId j, Channel& channel) {
  IterationCounters c;
  if (channel.skips(j)) return c;
  ++c.broadcasts;
  const InfoGaussian b = agents_.at(j).belief;
  for (AgentId i : graph_.neighbors(j)) {
    if (channel.deliver(j, i)) {
      agents_.at(i).inbox[j] = InboxEntry{b, iteration_ + 1};
      ++c.deliveries;
    } else {
      ++c.drops;
    }
  }
  return c;
}

IterationCounters LsbpNetwork::round() {
  PerfectChannel perfect;
  return round(perfect);
}

IterationCounters LsbpNetwork::round(Channel& channel, Schedule schedule, Rng* schedule_rng) {
  IterationCounters counters;
  const AgentId ref = graph_.reference();
  std::vector<AgentId> order = graph_.agents();

  if (schedule == Schedule::Synchronous) {
    for (AgentId j : order) counters += broadcast(j, channel);
    std::vector<InfoGaussian> updated(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (order[k] != ref) updated[k] = lsbp_update_belief(order[k], agents_.at(order[k]), measurements_);
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (order[k] != ref) agents_.at(order[k]).belief = updated[k];
    }
  } else {
    if (schedule_rng == nullptr) throw InvalidArgument("asynchronous schedule needs an rng");
    std::shuffle(order.begin(), order.end(), *schedule_rng);
    for (AgentId j : order) {
      if (j != ref) agents_.at(j).belief = lsbp_update_belief(j, agents_.at(j), measurements_);
      counters += broadcast(j, channel);
    }
  }
  ++iteration_;
  return counters;
}

namespace {

double neighbor_term(double sigma2, double precision) {
  return precision / (1.0 + precision * sigma2);  // 1 / (sigma2 + 1/precision)
}

}  // namespace

std::vector<double> variance_map(const Graph& g, const MeasurementSet& measurements,
                                 std::span<const double> precisions, double reference_precision) {
  const auto ids = g.non_reference_agents();
  if (precisions.size() != ids.size()) {
    throw InvalidArgument("precision vector has " + std::to_string(precisions.size()) +
                          " entries, expected " + std::to_string(ids.size()));
  }
  std::map<AgentId, double> lookup;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (!(precisions[k] >= 0.0)) throw InvalidArgument("precisions must be non-negative");
    lookup[ids[k]] = precisions[k];
  }
  lookup[g.reference()] = reference_precision;

  std::vector<double> out(ids.size(), 0.0);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    double sum = 0.0;
    for (AgentId j : g.neighbors(ids[k])) {
      sum += neighbor_term(measurements.at(ids[k], j).sigma2, lookup[j]);
    }
    out[k] = sum;
  }
  return out;
}

bool is_feasible_init(const Graph& g, const MeasurementSet& measurements,
                      std::span<const double> p0, double reference_precision) {
  const auto next = variance_map(g, measurements, p0, reference_precision);
  bool all_ge = true;
  bool all_le = true;
  for (std::size_t k = 0; k < next.size(); ++k) {
    all_ge = all_ge && next[k] >= p0[k];
    all_le = all_le && next[k] <= p0[k];
  }
  return all_ge || all_le;
}

std::vector<double> variance_fixed_point(const Graph& g, const MeasurementSet& measurements,
                                         std::span<const double> p0, double reference_precision,
                                         double rel_tol, std::size_t max_iterations) {
  std::vector<double> p(p0.begin(), p0.end());
  for (std::size_t it = 0; it < max_iterations; ++it) {
    auto next = variance_map(g, measurements, p, reference_precision);
    double worst = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double scale = std::max(std::abs(next[k]), std::abs(p[k]));
      if (scale > 0.0) worst = std::max(worst, std::abs(next[k] - p[k]) / scale);
    }
    p = std::move(next);
    if (worst <= rel_tol) return p;
  }
  throw NumericFailure("variance recursion did not settle within " +
                       std::to_string(max_iterations) + " iterations");
}

bool snapshots_settled(const BeliefSnapshot& prev, const BeliefSnapshot& cur, double mean_tol,
                       double prec_tol) {
  for (const auto& [id, b] : cur) {
    auto it = prev.find(id);
    if (it == prev.end()) return false;
    const InfoGaussian& a = it->second;
    if (a.is_flat() != b.is_flat()) return false;
    if (b.is_flat()) continue;
    if (!(std::abs(b.precision() - a.precision()) < prec_tol)) return false;
    if (!(std::abs(b.mean() - a.mean()) < mean_tol)) return false;
  }
  return true;
}

std::optional<std::size_t> detect_convergence(std::span<const BeliefSnapshot> trace,
                                              double mean_tol, double prec_tol,
                                              std::size_t first) {
  const std::size_t lo = std::max<std::size_t>(first, 1);
  std::optional<std::size_t> since;
  for (std::size_t l = trace.size(); l-- > lo;) {
    if (!snapshots_settled(trace[l - 1], trace[l], mean_tol, prec_tol)) break;
    since = l;
  }
  return since;
}

}  // namespace cfo
