#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "cfo/metrics.hpp"

namespace cfo {

// trace.csv: one row per (iteration, agent) with columns
//   iteration,agent,mean,variance,avg_mse,broadcasts,deliveries,drops,point_to_point
// Doubles use the shortest round-trip form; flat beliefs print nan/inf.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
std::vector<IterationRecord> read_trace_csv(std::istream& is);

// Parsed summary.json.
struct Summary {
  Algorithm algorithm = Algorithm::Lsbp;
  std::optional<std::size_t> converged_at;
  bool diverged = false;
  std::size_t iterations = 0;
  std::map<AgentId, double> estimates;
  std::size_t excluded_agents = 0;
  std::optional<double> rho_k;
  std::optional<double> crlb_avg;
  std::optional<double> mse_avg;
  std::map<AgentId, double> wls;
  std::map<AgentId, double> crlb;
};

void write_summary_json(std::ostream& os, const RunTrace& trace);
Summary read_summary_json(std::istream& is);

// NaN-aware equality of trace records, used to check file round trips.
bool same_records(const std::vector<IterationRecord>& a, const std::vector<IterationRecord>& b);

}  // namespace cfo
