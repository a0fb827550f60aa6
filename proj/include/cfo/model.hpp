#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "cfo/graph.hpp"
#include "cfo/rng.hpp"
#include "cfo/types.hpp"

namespace cfo {

// Per-agent pre-compensation shifts f_i in Hz. The reference value is known to
// the whole system.
struct GroundTruth {
  std::map<AgentId, double> offsets;
  AgentId reference = 1;

  double at(AgentId i) const;
  double reference_value() const { return at(reference); }
};

// Observed pairwise sum r = f_i + f_j + n, n ~ N(0, sigma2).
struct Measurement {
  Edge edge;
  double r = 0.0;       // Hz
  double sigma2 = 1.0;  // Hz^2

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

// One measurement per edge, looked up symmetrically.
class MeasurementSet {
 public:
  void insert(const Measurement& m);
  void erase_incident(AgentId i);

  const Measurement* find(AgentId i, AgentId j) const;
  // Throws InconsistentState if missing.
  const Measurement& at(AgentId i, AgentId j) const;

  std::size_t size() const noexcept { return by_edge_.size(); }
  bool empty() const noexcept { return by_edge_.empty(); }
  auto begin() const { return by_edge_.begin(); }
  auto end() const { return by_edge_.end(); }

  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;

 private:
  std::map<Edge, Measurement> by_edge_;
};

struct NoiseSpec {
  double sigma = 1.0;                      // Hz, homogeneous default
  std::map<Edge, double> sigma_overrides;  // per-edge sigma, Hz
  double sigma2_floor = 1e-12;             // stored sigma2 when sigma == 0

  double sigma_for(const Edge& e) const;
  double stored_sigma2(const Edge& e) const;
};

// f_i ~ U[-max_offset, max_offset], drawn in ascending agent order.
GroundTruth generate_truth(const Graph& g, double max_offset, std::uint64_t seed);

// Draws one offset for a late-joining agent from its own stream.
double draw_offset(double max_offset, std::uint64_t seed);

MeasurementSet generate_measurements(const Graph& g, const GroundTruth& truth,
                                     const NoiseSpec& noise, std::uint64_t seed);

Measurement draw_measurement(const Edge& e, const GroundTruth& truth, const NoiseSpec& noise,
                             Rng& rng);

// CSV: header "i,j,r,sigma2"; header "i,f".
void write_measurements_csv(std::ostream& os, const MeasurementSet& ms);
MeasurementSet read_measurements_csv(std::istream& is);
void write_truth_csv(std::ostream& os, const GroundTruth& truth);
GroundTruth read_truth_csv(std::istream& is, AgentId reference);

}  // namespace cfo
