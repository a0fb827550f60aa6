#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cfo/graph.hpp"
#include "cfo/model.hpp"

namespace cfo::test {

inline Graph triangle() {
  Graph g = Graph::with_agents(3);
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_edge(2, 3);
  return g;
}

inline Graph path3() {
  Graph g = Graph::with_agents(3);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return g;
}

inline Graph complete(std::size_t n) {
  Graph g = Graph::with_agents(n);
  for (AgentId i = 1; i <= n; ++i)
    for (AgentId j = i + 1; j <= n; ++j) g.add_edge(i, j);
  return g;
}

inline MeasurementSet measurements(std::initializer_list<Measurement> ms) {
  MeasurementSet out;
  for (const auto& m : ms) out.insert(m);
  return out;
}

// Random spanning tree plus `extra` chords on agents 1..n.
inline Graph random_connected(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
  Graph g = Graph::with_agents(n);
  for (AgentId i = 2; i <= n; ++i) {
    std::uniform_int_distribution<AgentId> parent(1, i - 1);
    g.add_edge(i, parent(rng));
  }
  std::uniform_int_distribution<AgentId> any(1, static_cast<AgentId>(n));
  for (std::size_t k = 0; k < extra; ++k) {
    AgentId a = any(rng), b = any(rng);
    if (a != b) g.add_edge(a, b);
  }
  return g;
}

// Truth plus measurements with per-edge sigma2 drawn from [lo, hi].
inline MeasurementSet random_measurements(const Graph& g, GroundTruth& truth, double lo, double hi,
                                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> f(-200.0, 200.0);
  std::uniform_real_distribution<double> s2(lo, hi);
  truth.reference = g.reference();
  for (AgentId i : g.agents()) truth.offsets[i] = f(rng);
  MeasurementSet ms;
  for (const Edge& e : g.edges()) {
    const double v = s2(rng);
    std::normal_distribution<double> n(0.0, std::sqrt(v));
    ms.insert(Measurement{e, truth.at(e.lo) + truth.at(e.hi) + n(rng), v});
  }
  return ms;
}

}  // namespace cfo::test
