#include "cfo/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include "cfo/errors.hpp"
#include "cfo/numfmt.hpp"
#include "cfo/rng.hpp"

namespace cfo {

std::uint64_t ExperimentConfig::topology_stream_seed() const {
  return rgg_seed ? *rgg_seed : derive_seed(master_seed, "topology");
}

std::uint64_t ExperimentConfig::truth_stream_seed() const {
  return truth_seed ? *truth_seed : derive_seed(master_seed, "truth");
}

std::uint64_t ExperimentConfig::noise_stream_seed(std::size_t trial) const {
  return derive_seed(noise_seed ? *noise_seed : derive_seed(master_seed, "noise"), "trial", trial);
}

std::uint64_t ExperimentConfig::loss_stream_seed(std::size_t trial) const {
  return derive_seed(network.loss_seed ? *network.loss_seed : derive_seed(master_seed, "loss"),
                     "trial", trial);
}

std::uint64_t ExperimentConfig::schedule_stream_seed(std::size_t trial) const {
  return derive_seed(master_seed, "schedule", trial);
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out)) throw ValidationError("config: " + key + ": not a number: '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  if (!parse_int(v, out)) throw ValidationError("config: " + key + ": not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config: " + key + ": expected true or false");
}

Edge to_edge(const std::string& key, const std::string& v) {
  const auto dash = v.find('-');
  if (dash == std::string::npos) throw ValidationError("config: " + key + ": bad edge '" + v + "'");
  const auto i = to_int<AgentId>(key, trim(v.substr(0, dash)));
  const auto j = to_int<AgentId>(key, trim(v.substr(dash + 1)));
  if (i == j) throw ValidationError("config: " + key + ": self-loop '" + v + "'");
  return Edge{i, j};
}

std::string resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.string();
}

}  // namespace

EventTimeline parse_timeline(const std::string& text) {
  EventTimeline out;
  for (const std::string& entry : split(text, ';')) {
    std::istringstream es(entry);
    std::vector<std::string> tok;
    for (std::string t; es >> t;) tok.push_back(t);
    if (tok.size() < 3) throw ValidationError("timeline: malformed event '" + entry + "'");
    TimelineEvent ev;
    ev.iteration = to_int<std::size_t>("timeline", tok[0]);
    if (tok[1] == "leave" && tok.size() == 3) {
      ev.kind = TimelineEvent::Kind::Leave;
      ev.agent = to_int<AgentId>("timeline", tok[2]);
    } else if (tok[1] == "join" && tok.size() == 3 && tok[2].starts_with('@')) {
      ev.kind = TimelineEvent::Kind::Join;
      ev.agent = to_int<AgentId>("timeline", tok[2].substr(1));
    } else if (tok[1] == "join" && tok.size() == 4) {
      ev.kind = TimelineEvent::Kind::Join;
      ev.position = Position{to_double("timeline", tok[2]), to_double("timeline", tok[3])};
    } else {
      throw ValidationError("timeline: malformed event '" + entry + "'");
    }
    if (!out.empty() && ev.iteration < out.back().iteration) {
      throw ValidationError("timeline: iterations must be non-decreasing");
    }
    out.push_back(ev);
  }
  return out;
}

std::string format_timeline(const EventTimeline& t) {
  std::string out;
  for (const TimelineEvent& ev : t) {
    if (!out.empty()) out += "; ";
    out += std::to_string(ev.iteration);
    if (ev.kind == TimelineEvent::Kind::Leave) {
      out += " leave " + std::to_string(ev.agent);
    } else if (ev.position) {
      out += " join " + format_double(ev.position->x) + " " + format_double(ev.position->y);
    } else {
      out += " join @" + std::to_string(ev.agent);
    }
  }
  return out;
}

ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"topology",
       [&](auto& k, auto& v) {
         if (v == "edges") c.topology = TopologyKind::Inline;
         else if (v == "random_geometric") c.topology = TopologyKind::RandomGeometric;
         else if (v == "file") c.topology = TopologyKind::File;
         else throw ValidationError("config: " + k + ": expected edges, random_geometric or file");
       }},
      {"num_agents", [&](auto& k, auto& v) { c.num_agents = to_int<std::size_t>(k, v); }},
      {"reference_id", [&](auto& k, auto& v) { c.reference_id = to_int<AgentId>(k, v); }},
      {"edges",
       [&](auto& k, auto& v) {
         for (const auto& e : split(v, ',')) c.edges.push_back(to_edge(k, e));
       }},
      {"positions",
       [&](auto& k, auto& v) {
         for (const auto& item : split(v, ',')) {
           auto parts = split(item, ':');
           if (parts.size() != 3) throw ValidationError("config: " + k + ": expected id:x:y");
           c.positions[to_int<AgentId>(k, parts[0])] =
               Position{to_double(k, parts[1]), to_double(k, parts[2])};
         }
       }},
      {"graph_file", [&](auto&, auto& v) { c.graph_file = resolve(base_dir, v); }},
      {"rgg_agents", [&](auto& k, auto& v) { c.rgg.agents = to_int<std::size_t>(k, v); }},
      {"rgg_width", [&](auto& k, auto& v) { c.rgg.width = to_double(k, v); }},
      {"rgg_height", [&](auto& k, auto& v) { c.rgg.height = to_double(k, v); }},
      {"rgg_radius", [&](auto& k, auto& v) { c.rgg.radius = to_double(k, v); }},
      {"rgg_seed", [&](auto& k, auto& v) { c.rgg_seed = to_int<std::uint64_t>(k, v); }},
      {"rgg_max_attempts", [&](auto& k, auto& v) { c.rgg.max_attempts = to_int<int>(k, v); }},
      {"join_radius", [&](auto& k, auto& v) { c.join_radius = to_double(k, v); }},
      {"max_offset", [&](auto& k, auto& v) { c.max_offset = to_double(k, v); }},
      {"truth_seed", [&](auto& k, auto& v) { c.truth_seed = to_int<std::uint64_t>(k, v); }},
      {"truth_file", [&](auto&, auto& v) { c.truth_file = resolve(base_dir, v); }},
      {"sigma", [&](auto& k, auto& v) { c.noise.sigma = to_double(k, v); }},
      {"sigma_overrides",
       [&](auto& k, auto& v) {
         for (const auto& item : split(v, ',')) {
           const auto colon = item.find(':');
           if (colon == std::string::npos) throw ValidationError("config: " + k + ": expected i-j:sigma");
           c.noise.sigma_overrides[to_edge(k, trim(item.substr(0, colon)))] =
               to_double(k, trim(item.substr(colon + 1)));
         }
       }},
      {"sigma2_floor", [&](auto& k, auto& v) { c.noise.sigma2_floor = to_double(k, v); }},
      {"noise_seed", [&](auto& k, auto& v) { c.noise_seed = to_int<std::uint64_t>(k, v); }},
      {"measurements_file", [&](auto&, auto& v) { c.measurements_file = resolve(base_dir, v); }},
      {"algorithm", [&](auto&, auto& v) { c.algorithm = parse_algorithm(v); }},
      {"schedule",
       [&](auto& k, auto& v) {
         if (v == "synchronous") c.schedule = Schedule::Synchronous;
         else if (v == "asynchronous") c.schedule = Schedule::Asynchronous;
         else throw ValidationError("config: " + k + ": expected synchronous or asynchronous");
       }},
      {"init_mode",
       [&](auto& k, auto& v) {
         if (v == "zero_precision") c.init.mode = InitMode::ZeroPrecision;
         else if (v == "uniform_variance") c.init.mode = InitMode::UniformVariance;
         else throw ValidationError("config: " + k + ": expected zero_precision or uniform_variance");
       }},
      {"init_variance", [&](auto& k, auto& v) { c.init.variance = to_double(k, v); }},
      {"init_mean", [&](auto& k, auto& v) { c.init.mean = to_double(k, v); }},
      {"pdr", [&](auto& k, auto& v) { c.network.pdr = to_double(k, v); }},
      {"loss_seed", [&](auto& k, auto& v) { c.network.loss_seed = to_int<std::uint64_t>(k, v); }},
      {"delay_mode",
       [&](auto& k, auto& v) {
         if (v == "none") c.network.delay = DelayMode::None;
         else if (v == "random_skip") c.network.delay = DelayMode::RandomSkip;
         else throw ValidationError("config: " + k + ": expected none or random_skip");
       }},
      {"skip_prob", [&](auto& k, auto& v) { c.network.skip_prob = to_double(k, v); }},
      {"timeline", [&](auto&, auto& v) { c.timeline = parse_timeline(v); }},
      {"l_max", [&](auto& k, auto& v) { c.l_max = to_int<std::size_t>(k, v); }},
      {"mean_tol", [&](auto& k, auto& v) { c.mean_tol = to_double(k, v); }},
      {"prec_tol", [&](auto& k, auto& v) { c.prec_tol = to_double(k, v); }},
      {"mse_normalization_B", [&](auto& k, auto& v) { c.mse_normalization_b = to_double(k, v); }},
      {"monte_carlo_trials",
       [&](auto& k, auto& v) { c.monte_carlo_trials = to_int<std::size_t>(k, v); }},
      {"master_seed", [&](auto& k, auto& v) { c.master_seed = to_int<std::uint64_t>(k, v); }},
      {"reference_precision", [&](auto& k, auto& v) { c.reference_precision = to_double(k, v); }},
      {"divergence_guard", [&](auto& k, auto& v) { c.divergence_guard = to_double(k, v); }},
      {"oracle", [&](auto& k, auto& v) { c.oracle = to_bool(k, v); }},
  };

  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    it->second(key, value);
  }
  check_config_values(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

void check_config_values(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  require(c.network.pdr >= 0.0 && c.network.pdr <= 1.0, "pdr must lie in [0, 1]");
  require(c.network.skip_prob >= 0.0 && c.network.skip_prob < 1.0, "skip_prob must lie in [0, 1)");
  require(c.monte_carlo_trials >= 1, "monte_carlo_trials must be at least 1");
  require(c.mse_normalization_b > 0.0, "mse_normalization_B must be positive");
  require(c.mean_tol > 0.0 && c.prec_tol > 0.0, "tolerances must be positive");
  require(c.noise.sigma >= 0.0, "sigma must be non-negative");
  for (const auto& [e, s] : c.noise.sigma_overrides) require(s >= 0.0, "sigma overrides must be non-negative");
  require(c.noise.sigma2_floor > 0.0, "sigma2_floor must be positive");
  require(c.max_offset >= 0.0, "max_offset must be non-negative");
  require(c.reference_precision > 0.0, "reference_precision must be positive");
  require(c.init.mode == InitMode::ZeroPrecision || c.init.variance > 0.0,
          "init_variance must be positive");
  if (c.topology == TopologyKind::RandomGeometric) {
    require(c.rgg.agents >= 2, "rgg_agents must be at least 2");
    require(c.rgg.radius > 0.0, "rgg_radius must be positive");
  }
  if (c.topology == TopologyKind::Inline) require(c.num_agents >= 1, "num_agents must be at least 1");
  if (c.topology == TopologyKind::File) require(!c.graph_file.empty(), "topology = file needs graph_file");
  if (c.join_radius) require(*c.join_radius > 0.0, "join_radius must be positive");
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  auto seed_line = [&](const char* key, const std::optional<std::uint64_t>& s) {
    if (s) os << key << " = " << *s << '\n';
  };
  switch (c.topology) {
    case TopologyKind::Inline: {
      os << "topology = edges\nnum_agents = " << c.num_agents << "\nreference_id = " << c.reference_id
         << '\n';
      std::string edges;
      for (const Edge& e : c.edges) edges += (edges.empty() ? "" : ", ") + std::to_string(e.lo) + "-" + std::to_string(e.hi);
      os << "edges = " << edges << '\n';
      if (!c.positions.empty()) {
        std::string pos;
        for (const auto& [id, p] : c.positions) {
          pos += (pos.empty() ? "" : ", ") + std::to_string(id) + ":" + format_double(p.x) + ":" +
                 format_double(p.y);
        }
        os << "positions = " << pos << '\n';
      }
      break;
    }
    case TopologyKind::RandomGeometric:
      os << "topology = random_geometric\nrgg_agents = " << c.rgg.agents
         << "\nrgg_width = " << format_double(c.rgg.width)
         << "\nrgg_height = " << format_double(c.rgg.height)
         << "\nrgg_radius = " << format_double(c.rgg.radius)
         << "\nrgg_max_attempts = " << c.rgg.max_attempts << '\n';
      seed_line("rgg_seed", c.rgg_seed);
      break;
    case TopologyKind::File:
      os << "topology = file\ngraph_file = " << c.graph_file << '\n';
      break;
  }
  if (c.join_radius) os << "join_radius = " << format_double(*c.join_radius) << '\n';
  os << "max_offset = " << format_double(c.max_offset) << '\n';
  seed_line("truth_seed", c.truth_seed);
  if (!c.truth_file.empty()) os << "truth_file = " << c.truth_file << '\n';
  os << "sigma = " << format_double(c.noise.sigma) << '\n';
  if (!c.noise.sigma_overrides.empty()) {
    std::string s;
    for (const auto& [e, v] : c.noise.sigma_overrides) {
      s += (s.empty() ? "" : ", ") + std::to_string(e.lo) + "-" + std::to_string(e.hi) + ":" + format_double(v);
    }
    os << "sigma_overrides = " << s << '\n';
  }
  os << "sigma2_floor = " << format_double(c.noise.sigma2_floor) << '\n';
  seed_line("noise_seed", c.noise_seed);
  if (!c.measurements_file.empty()) os << "measurements_file = " << c.measurements_file << '\n';
  os << "algorithm = " << to_string(c.algorithm) << '\n';
  os << "schedule = " << (c.schedule == Schedule::Synchronous ? "synchronous" : "asynchronous") << '\n';
  os << "init_mode = " << (c.init.mode == InitMode::ZeroPrecision ? "zero_precision" : "uniform_variance")
     << '\n';
  os << "init_variance = " << format_double(c.init.variance) << '\n';
  os << "init_mean = " << format_double(c.init.mean) << '\n';
  os << "pdr = " << format_double(c.network.pdr) << '\n';
  seed_line("loss_seed", c.network.loss_seed);
  os << "delay_mode = " << (c.network.delay == DelayMode::None ? "none" : "random_skip") << '\n';
  os << "skip_prob = " << format_double(c.network.skip_prob) << '\n';
  if (!c.timeline.empty()) os << "timeline = " << format_timeline(c.timeline) << '\n';
  os << "l_max = " << c.l_max << '\n';
  os << "mean_tol = " << format_double(c.mean_tol) << '\n';
  os << "prec_tol = " << format_double(c.prec_tol) << '\n';
  os << "mse_normalization_B = " << format_double(c.mse_normalization_b) << '\n';
  os << "monte_carlo_trials = " << c.monte_carlo_trials << '\n';
  os << "master_seed = " << c.master_seed << '\n';
  os << "reference_precision = " << format_double(c.reference_precision) << '\n';
  os << "divergence_guard = " << format_double(c.divergence_guard) << '\n';
  os << "oracle = " << (c.oracle ? "true" : "false") << '\n';
  return os.str();
}

FigureProtocol parse_figure(const std::string& name) {
  std::string n;
  for (char ch : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (n == "fig1") return FigureProtocol::Fig1;
  if (n == "fig2") return FigureProtocol::Fig2;
  if (n == "fig3") return FigureProtocol::Fig3;
  throw ValidationError("unknown figure protocol '" + name + "' (expected FIG1, FIG2 or FIG3)");
}

ExperimentConfig network_config() {
  ExperimentConfig c;
  c.topology = TopologyKind::RandomGeometric;
  c.rgg = GeometricParams{};  // 100 agents, 3 km x 4 km, 1 km radius
  c.rgg_seed = 7;
  c.truth_seed = 11;
  c.noise_seed = 13;
  c.network.loss_seed = 17;
  c.max_offset = 200.0;
  c.noise.sigma = 1.0;
  return c;
}

std::vector<NamedConfig> fig_protocols(FigureProtocol which, const ProtocolOverrides& overrides) {
  return fig_protocols(which, network_config(), overrides);
}

std::vector<NamedConfig> fig_protocols(FigureProtocol which, const ExperimentConfig& base_in,
                                       const ProtocolOverrides& overrides) {
  ExperimentConfig base = base_in;
  if (overrides.l_max) base.l_max = *overrides.l_max;
  if (overrides.trials) base.monte_carlo_trials = *overrides.trials;
  if (overrides.master_seed) base.master_seed = *overrides.master_seed;

  std::vector<NamedConfig> out;
  switch (which) {
    case FigureProtocol::Fig1:
      for (double p0 : {100.0, 10.0, 1.0, 0.1, 0.01}) {
        ExperimentConfig c = base;
        c.algorithm = Algorithm::Lsbp;
        c.network.pdr = 0.8;
        c.init.mode = InitMode::UniformVariance;
        c.init.variance = p0;
        out.push_back({"fig1_p0_" + format_double(p0), c});
      }
      break;
    case FigureProtocol::Fig2:
      for (Algorithm a : {Algorithm::Bp, Algorithm::Lsbp}) {
        for (double pdr : {0.6, 0.8}) {
          ExperimentConfig c = base;
          c.algorithm = a;
          c.network.pdr = pdr;
          c.oracle = true;
          out.push_back({"fig2_" + to_string(a) + "_pdr" + format_double(pdr), c});
        }
      }
      break;
    case FigureProtocol::Fig3:
      for (Algorithm a : {Algorithm::Bp, Algorithm::Lsbp}) {
        ExperimentConfig c = base;
        c.algorithm = a;
        c.oracle = true;
        c.network.pdr = 0.8;
        if (a == Algorithm::Lsbp) c.schedule = Schedule::Asynchronous;
        c.timeline = parse_timeline(
            "5 leave 4; 5 leave 5; 5 leave 8; 5 leave 10; "
            "10 join @4; 10 join @5; 11 join @8; 11 join @10");
        out.push_back({"fig3_" + to_string(a), c});
      }
      break;
  }
  return out;
}

}  // namespace cfo
