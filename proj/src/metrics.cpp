#include "cfo/metrics.hpp"

#include <limits>

#include "cfo/errors.hpp"

namespace cfo {

MseResult avg_mse(const std::map<AgentId, std::optional<double>>& estimates,
                  const std::map<AgentId, double>& truth, double normalization_b) {
  if (!(normalization_b > 0.0)) throw InvalidArgument("MSE normalisation B must be positive");
  MseResult out;
  double sum = 0.0;
  for (const auto& [id, est] : estimates) {
    auto t = truth.find(id);
    if (t == truth.end()) continue;
    if (!est) {
      ++out.excluded;
      continue;
    }
    const double e = (*est - t->second) / normalization_b;
    sum += e * e;
    ++out.agents;
  }
  if (out.agents == 0) throw UndefinedMetric("no active agent has a defined estimate");
  out.value = sum / static_cast<double>(out.agents);
  return out;
}

std::string to_string(Algorithm a) { return a == Algorithm::Bp ? "bp" : "lsbp"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "bp") return Algorithm::Bp;
  if (s == "lsbp") return Algorithm::Lsbp;
  throw ValidationError("unknown algorithm '" + s + "' (expected bp or lsbp)");
}

double RunTrace::final_mse() const {
  return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().avg_mse;
}

}  // namespace cfo
