#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfo/graph.hpp"
#include "cfo/lsbp.hpp"
#include "cfo/metrics.hpp"
#include "cfo/model.hpp"

namespace cfo {

enum class TopologyKind { Inline, RandomGeometric, File };
enum class DelayMode { None, RandomSkip };

struct NetworkModel {
  double pdr = 1.0;
  std::optional<std::uint64_t> loss_seed;
  DelayMode delay = DelayMode::None;
  double skip_prob = 0.0;  // RandomSkip: chance an agent stays silent for one iteration
};

struct TimelineEvent {
  enum class Kind { Leave, Join };
  std::size_t iteration = 0;
  Kind kind = Kind::Leave;
  AgentId agent = 0;                 // Leave target, or Join "@agent" source position
  std::optional<Position> position;  // explicit Join position

  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

using EventTimeline = std::vector<TimelineEvent>;

struct ExperimentConfig {
  // topology
  TopologyKind topology = TopologyKind::RandomGeometric;
  std::size_t num_agents = 0;
  AgentId reference_id = 1;
  std::vector<Edge> edges;
  std::map<AgentId, Position> positions;
  std::string graph_file;
  GeometricParams rgg;
  std::optional<std::uint64_t> rgg_seed;
  std::optional<double> join_radius;  // defaults to rgg.radius

  // truth
  double max_offset = 200.0;
  std::optional<std::uint64_t> truth_seed;
  std::string truth_file;

  // noise
  NoiseSpec noise;
  std::optional<std::uint64_t> noise_seed;
  std::string measurements_file;

  Algorithm algorithm = Algorithm::Lsbp;
  Schedule schedule = Schedule::Synchronous;
  FeasibleInit init;
  NetworkModel network;
  EventTimeline timeline;

  std::size_t l_max = 100;
  double mean_tol = 1e-9;
  double prec_tol = 1e-12;
  double mse_normalization_b = 1.0;
  std::size_t monte_carlo_trials = 1;
  std::uint64_t master_seed = 0;
  double reference_precision = 1e12;
  double divergence_guard = 1e12;
  bool oracle = false;

  // Seeds for the named random streams, honouring explicit overrides.
  std::uint64_t topology_stream_seed() const;
  std::uint64_t truth_stream_seed() const;
  std::uint64_t noise_stream_seed(std::size_t trial) const;
  std::uint64_t loss_stream_seed(std::size_t trial) const;
  std::uint64_t schedule_stream_seed(std::size_t trial) const;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys, malformed
// values and duplicate keys raise ValidationError. Relative file paths are
// resolved against `base_dir`.
ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_config_text(const ExperimentConfig& c);

// Range checks that need no I/O (pdr in [0,1], trials >= 1, ...).
void check_config_values(const ExperimentConfig& c);

EventTimeline parse_timeline(const std::string& text);
std::string format_timeline(const EventTimeline& t);

enum class FigureProtocol { Fig1, Fig2, Fig3 };
FigureProtocol parse_figure(const std::string& name);

struct ProtocolOverrides {
  std::optional<std::size_t> l_max;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> master_seed;
};

struct NamedConfig {
  std::string name;
  ExperimentConfig config;
};

// Expands a figure protocol into its batch of runs on the default 100-agent
// random geometric topology.
std::vector<NamedConfig> fig_protocols(FigureProtocol which, const ExperimentConfig& base,
                                       const ProtocolOverrides& overrides = {});
std::vector<NamedConfig> fig_protocols(FigureProtocol which,
                                       const ProtocolOverrides& overrides = {});

// Defaults shared by the figure protocols.
ExperimentConfig network_config();

}  // namespace cfo
