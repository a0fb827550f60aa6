#include "cfo/trace_io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cfo/errors.hpp"
#include "cfo/numfmt.hpp"

namespace cfo {

namespace {

constexpr const char* kTraceHeader =
    "iteration,agent,mean,variance,avg_mse,broadcasts,deliveries,drops,point_to_point";

bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << '\n';
  for (const IterationRecord& rec : trace.records) {
    const std::string tail = format_double(rec.avg_mse) + ',' +
                             std::to_string(rec.counters.broadcasts) + ',' +
                             std::to_string(rec.counters.deliveries) + ',' +
                             std::to_string(rec.counters.drops) + ',' +
                             std::to_string(rec.counters.point_to_point);
    for (const AgentSample& s : rec.agents) {
      os << rec.iteration << ',' << s.agent << ',' << format_double(s.mean) << ','
         << format_double(s.variance) << ',' << tail << '\n';
    }
  }
}

std::vector<IterationRecord> read_trace_csv(std::istream& is) {
  std::vector<IterationRecord> out;
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) {
    throw ValidationError("trace csv: unexpected header");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    std::size_t iteration = 0;
    AgentSample sample;
    double mse = 0.0;
    IterationCounters c;
    if (cells.size() != 9 || !parse_int(cells[0], iteration) || !parse_int(cells[1], sample.agent) ||
        !parse_double(cells[2], sample.mean) || !parse_double(cells[3], sample.variance) ||
        !parse_double(cells[4], mse) || !parse_int(cells[5], c.broadcasts) ||
        !parse_int(cells[6], c.deliveries) || !parse_int(cells[7], c.drops) ||
        !parse_int(cells[8], c.point_to_point)) {
      throw ValidationError("trace csv line " + std::to_string(lineno) + ": malformed row");
    }
    if (out.empty() || out.back().iteration != iteration) {
      IterationRecord rec;
      rec.iteration = iteration;
      rec.avg_mse = mse;
      rec.counters = c;
      out.push_back(std::move(rec));
    }
    out.back().agents.push_back(sample);
  }
  return out;
}

void write_summary_json(std::ostream& os, const RunTrace& trace) {
  using nlohmann::json;
  json j;
  j["algorithm"] = to_string(trace.algorithm);
  j["converged_at"] = trace.converged_at ? json(*trace.converged_at) : json(nullptr);
  j["diverged"] = trace.diverged;
  j["iterations"] = trace.records.empty() ? 0 : trace.records.back().iteration;
  json est = json::object();
  for (const auto& [id, v] : trace.estimates) est[std::to_string(id)] = v;
  j["estimates"] = est;
  j["excluded_agents"] = trace.excluded_agents;
  const double mse = trace.final_mse();
  j["mse_avg"] = std::isfinite(mse) ? json(mse) : json(nullptr);
  json trials = json::array();
  for (const auto& c : trace.trial_converged_at) trials.push_back(c ? json(*c) : json(nullptr));
  j["trial_converged_at"] = trials;
  if (trace.oracle) {
    j["rho_K"] = trace.oracle->rho_k;
    j["crlb_avg"] = trace.oracle->crlb_avg;
    json wls = json::object();
    json crlb = json::object();
    for (const auto& [id, v] : trace.oracle->wls) wls[std::to_string(id)] = v;
    for (const auto& [id, v] : trace.oracle->crlb) crlb[std::to_string(id)] = v;
    j["oracle"] = {{"wls", wls}, {"crlb", crlb}};
  } else {
    j["rho_K"] = nullptr;
    j["crlb_avg"] = nullptr;
  }
  os << j.dump(2) << '\n';
}

Summary read_summary_json(std::istream& is) {
  using nlohmann::json;
  Summary s;
  try {
    const json j = json::parse(is);
    s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!j.at("converged_at").is_null()) s.converged_at = j["converged_at"].get<std::size_t>();
    s.diverged = j.at("diverged").get<bool>();
    s.iterations = j.at("iterations").get<std::size_t>();
    for (const auto& [k, v] : j.at("estimates").items()) {
      s.estimates[static_cast<AgentId>(std::stoul(k))] = v.get<double>();
    }
    s.excluded_agents = j.at("excluded_agents").get<std::size_t>();
    if (!j.at("mse_avg").is_null()) s.mse_avg = j["mse_avg"].get<double>();
    if (!j.at("rho_K").is_null()) s.rho_k = j["rho_K"].get<double>();
    if (!j.at("crlb_avg").is_null()) s.crlb_avg = j["crlb_avg"].get<double>();
    if (j.contains("oracle")) {
      for (const auto& [k, v] : j["oracle"].at("wls").items()) {
        s.wls[static_cast<AgentId>(std::stoul(k))] = v.get<double>();
      }
      for (const auto& [k, v] : j["oracle"].at("crlb").items()) {
        s.crlb[static_cast<AgentId>(std::stoul(k))] = v.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("summary json: ") + e.what());
  }
  return s;
}

bool same_records(const std::vector<IterationRecord>& a, const std::vector<IterationRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a[k];
    const auto& y = b[k];
    if (x.iteration != y.iteration || !same_double(x.avg_mse, y.avg_mse) ||
        !(x.counters == y.counters) || x.agents.size() != y.agents.size()) {
      return false;
    }
    for (std::size_t n = 0; n < x.agents.size(); ++n) {
      if (x.agents[n].agent != y.agents[n].agent || !same_double(x.agents[n].mean, y.agents[n].mean) ||
          !same_double(x.agents[n].variance, y.agents[n].variance)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace cfo
