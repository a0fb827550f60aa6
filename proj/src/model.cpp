#include "cfo/model.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cfo/errors.hpp"
#include "cfo/numfmt.hpp"

namespace cfo {

double GroundTruth::at(AgentId i) const {
  auto it = offsets.find(i);
  if (it == offsets.end()) throw InvalidArgument("no ground truth for agent " + std::to_string(i));
  return it->second;
}

void MeasurementSet::insert(const Measurement& m) {
  if (!(m.sigma2 > 0.0)) throw InvalidArgument("measurement sigma2 must be positive");
  by_edge_[m.edge] = m;
}

void MeasurementSet::erase_incident(AgentId i) {
  std::erase_if(by_edge_, [i](const auto& kv) { return kv.first.touches(i); });
}

const Measurement* MeasurementSet::find(AgentId i, AgentId j) const {
  auto it = by_edge_.find(Edge{i, j});
  return it == by_edge_.end() ? nullptr : &it->second;
}

const Measurement& MeasurementSet::at(AgentId i, AgentId j) const {
  if (const Measurement* m = find(i, j)) return *m;
  throw InconsistentState("missing measurement for edge " + std::to_string(i) + "-" +
                          std::to_string(j));
}

double NoiseSpec::sigma_for(const Edge& e) const {
  auto it = sigma_overrides.find(e);
  return it == sigma_overrides.end() ? sigma : it->second;
}

double NoiseSpec::stored_sigma2(const Edge& e) const {
  const double s = sigma_for(e);
  return s > 0.0 ? s * s : sigma2_floor;
}

GroundTruth generate_truth(const Graph& g, double max_offset, std::uint64_t seed) {
  if (max_offset < 0.0) throw InvalidArgument("max_offset must be non-negative");
  GroundTruth truth;
  truth.reference = g.reference();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-max_offset, max_offset);
  for (AgentId id : g.agents()) truth.offsets[id] = max_offset > 0.0 ? u(rng) : 0.0;
  return truth;
}

double draw_offset(double max_offset, std::uint64_t seed) {
  if (max_offset <= 0.0) return 0.0;
  Rng rng = make_rng(seed);
  return std::uniform_real_distribution<double>(-max_offset, max_offset)(rng);
}

Measurement draw_measurement(const Edge& e, const GroundTruth& truth, const NoiseSpec& noise,
                             Rng& rng) {
  const double sigma = noise.sigma_for(e);
  if (sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
  double n = 0.0;
  if (sigma > 0.0) n = std::normal_distribution<double>(0.0, sigma)(rng);
  return Measurement{e, truth.at(e.lo) + truth.at(e.hi) + n, noise.stored_sigma2(e)};
}

MeasurementSet generate_measurements(const Graph& g, const GroundTruth& truth,
                                     const NoiseSpec& noise, std::uint64_t seed) {
  if (noise.sigma < 0.0) throw InvalidArgument("sigma must be non-negative");
  if (!(noise.sigma2_floor > 0.0)) throw InvalidArgument("sigma2 floor must be positive");
  MeasurementSet out;
  Rng rng = make_rng(seed);
  for (const Edge& e : g.edges()) out.insert(draw_measurement(e, truth, noise, rng));
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void write_measurements_csv(std::ostream& os, const MeasurementSet& ms) {
  os << "i,j,r,sigma2\n";
  for (const auto& [e, m] : ms) {
    os << e.lo << ',' << e.hi << ',' << format_double(m.r) << ',' << format_double(m.sigma2) << '\n';
  }
}

MeasurementSet read_measurements_csv(std::istream& is) {
  MeasurementSet ms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    auto cells = split_csv(line);
    AgentId i = 0, j = 0;
    Measurement m;
    if (cells.size() != 4 || !parse_int(cells[0], i) || !parse_int(cells[1], j) ||
        !parse_double(cells[2], m.r) || !parse_double(cells[3], m.sigma2) || i == j) {
      throw ValidationError("measurements csv line " + std::to_string(lineno) + ": malformed row");
    }
    m.edge = Edge{i, j};
    if (!(m.sigma2 > 0.0)) {
      throw ValidationError("measurements csv line " + std::to_string(lineno) +
                            ": sigma2 must be positive");
    }
    ms.insert(m);
  }
  return ms;
}

void write_truth_csv(std::ostream& os, const GroundTruth& truth) {
  os << "i,f\n";
  for (const auto& [id, f] : truth.offsets) os << id << ',' << format_double(f) << '\n';
}

GroundTruth read_truth_csv(std::istream& is, AgentId reference) {
  GroundTruth truth;
  truth.reference = reference;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    auto cells = split_csv(line);
    AgentId i = 0;
    double f = 0.0;
    if (cells.size() != 2 || !parse_int(cells[0], i) || !parse_double(cells[1], f)) {
      throw ValidationError("truth csv line " + std::to_string(lineno) + ": malformed row");
    }
    truth.offsets[i] = f;
  }
  return truth;
}

}  // namespace cfo
