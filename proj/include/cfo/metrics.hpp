#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfo/channel.hpp"
#include "cfo/types.hpp"

namespace cfo {

struct MseResult {
  double value = 0.0;        // dimensionless
  std::size_t agents = 0;    // agents that contributed
  std::size_t excluded = 0;  // agents without a defined estimate
};

// (1/N) sum ((f_hat - f) / B)^2 over agents with defined estimates that have a
// ground-truth entry. Throws UndefinedMetric if no agent qualifies.
MseResult avg_mse(const std::map<AgentId, std::optional<double>>& estimates,
                  const std::map<AgentId, double>& truth, double normalization_b);

enum class Algorithm { Bp, Lsbp };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct AgentSample {
  AgentId agent = 0;
  double mean = 0.0;      // nan while the belief is flat
  double variance = 0.0;  // inf while the belief is flat

  friend bool operator==(const AgentSample&, const AgentSample&) = default;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<AgentSample> agents;  // first Monte-Carlo trial
  double avg_mse = 0.0;             // averaged over trials; nan if undefined
  IterationCounters counters;       // first Monte-Carlo trial
};

struct OracleColumns {
  std::map<AgentId, double> wls;    // Hz
  std::map<AgentId, double> crlb;   // Hz^2
  double rho_k = 0.0;
  double crlb_avg = 0.0;            // normalised by B^2
};

// Everything a run produces. Per-agent samples and counters come from trial 0;
// avg_mse is the Monte-Carlo average.
struct RunTrace {
  Algorithm algorithm = Algorithm::Lsbp;
  std::vector<IterationRecord> records;
  std::optional<std::size_t> converged_at;  // latest over trials; empty if any trial did not
  std::vector<std::optional<std::size_t>> trial_converged_at;
  bool diverged = false;
  std::map<AgentId, double> estimates;  // final means of trial 0
  std::size_t excluded_agents = 0;      // at the final iteration
  std::optional<OracleColumns> oracle;

  double final_mse() const;
};

}  // namespace cfo
