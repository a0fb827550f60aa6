#include "cfo/bp.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cfo/errors.hpp"

namespace cfo {

BpState::BpState(Graph graph, MeasurementSet measurements, BpOptions options)
    : options_(options) {
  set_topology(std::move(graph), std::move(measurements));
}

void BpState::set_topology(Graph graph, MeasurementSet measurements) {
  for (const Edge& e : graph.edges()) measurements.at(e.lo, e.hi);
  std::map<AgentId, std::map<AgentId, InfoGaussian>> next;
  for (AgentId i : graph.agents()) {
    auto& slot = next[i];
    for (AgentId j : graph.neighbors(i)) slot[j] = received(j, i);
  }
  graph_ = std::move(graph);
  measurements_ = std::move(measurements);
  inbox_ = std::move(next);
}

InfoGaussian BpState::pinned() const {
  return InfoGaussian::from_info(options_.reference_precision,
                                 options_.reference_precision * options_.reference_mean);
}

InfoGaussian BpState::received(AgentId from, AgentId to) const {
  auto it = inbox_.find(to);
  if (it == inbox_.end()) return InfoGaussian::flat();
  auto jt = it->second.find(from);
  return jt == it->second.end() ? InfoGaussian::flat() : jt->second;
}

void BpState::set_received(AgentId from, AgentId to, const InfoGaussian& m) {
  if (!graph_.has_edge(from, to)) {
    throw InvalidArgument("no edge " + std::to_string(from) + "-" + std::to_string(to));
  }
  inbox_[to][from] = m;
}

InfoGaussian BpState::compute_message(AgentId j, AgentId i) const {
  if (!graph_.has_edge(i, j)) {
    throw InvalidArgument("no edge " + std::to_string(j) + "-" + std::to_string(i));
  }
  const Measurement& m = measurements_.at(i, j);
  InfoGaussian cavity;
  if (j == graph_.reference()) {
    cavity = pinned();
  } else {
    for (const auto& [k, msg] : inbox_.at(j)) {
      if (k != i) cavity *= msg;
    }
  }
  return sum_max_marginal(m.r, m.sigma2, cavity);
}

InfoGaussian BpState::belief(AgentId i) const {
  if (i == graph_.reference()) return pinned();
  InfoGaussian b;
  for (const auto& [j, msg] : inbox_.at(i)) b *= msg;
  return b;
}

IterationCounters BpState::iterate() {
  PerfectChannel perfect;
  return iterate(perfect);
}

IterationCounters BpState::iterate(Channel& channel) {
  struct Outgoing {
    AgentId from;
    AgentId to;
    InfoGaussian msg;
  };
  std::vector<Outgoing> out;
  out.reserve(2 * graph_.num_edges());
  IterationCounters counters;
  try {
    for (AgentId j : graph_.agents()) {
      if (channel.skips(j)) continue;
      for (AgentId i : graph_.neighbors(j)) out.push_back({j, i, compute_message(j, i)});
    }
  } catch (const InvalidArgument&) {
    // Non-finite message parameters: the loopy recursion has blown up.
    diverged_ = true;
    ++iteration_;
    return counters;
  }
  for (const Outgoing& o : out) {
    ++counters.point_to_point;
    if (channel.deliver(o.from, o.to)) {
      inbox_[o.to][o.from] = o.msg;
      ++counters.deliveries;
    } else {
      ++counters.drops;
    }
  }
  ++iteration_;
  check_divergence();
  return counters;
}

void BpState::check_divergence() {
  for (AgentId i : graph_.agents()) {
    const InfoGaussian b = belief(i);
    if (!std::isfinite(b.precision()) || !std::isfinite(b.weighted_mean())) {
      diverged_ = true;
      return;
    }
    if (!b.is_flat() && std::abs(b.mean()) > options_.divergence_guard) {
      diverged_ = true;
      return;
    }
  }
}

std::map<AgentId, std::optional<double>> BpState::estimates() const {
  std::map<AgentId, std::optional<double>> out;
  for (AgentId i : graph_.agents()) {
    const InfoGaussian b = belief(i);
    out[i] = b.is_flat() ? std::nullopt : std::optional<double>(b.mean());
  }
  return out;
}

std::map<AgentId, InfoGaussian> BpState::beliefs() const {
  std::map<AgentId, InfoGaussian> out;
  for (AgentId i : graph_.agents()) out[i] = belief(i);
  return out;
}

}  // namespace cfo
