#include "cfo/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cfo/config.hpp"
#include "cfo/errors.hpp"
#include "cfo/netsim.hpp"
#include "cfo/trace_io.hpp"

namespace cfo {

namespace {

struct Options {
  std::string config_path;
  std::string protocol;
  std::string algo;
  std::optional<double> pdr;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iters;
  std::optional<std::size_t> trials;
  std::string out = ".";
  std::string emit = "both";
  bool oracle = false;
};

void apply_overrides(ExperimentConfig& c, const Options& o) {
  if (!o.algo.empty()) c.algorithm = parse_algorithm(o.algo);
  if (o.pdr) c.network.pdr = *o.pdr;
  if (o.seed) c.master_seed = *o.seed;
  if (o.iters) c.l_max = *o.iters;
  if (o.trials) c.monte_carlo_trials = *o.trials;
  if (o.oracle) c.oracle = true;
  check_config_values(c);
}

void write_outputs(const RunTrace& trace, const std::filesystem::path& dir, const std::string& emit) {
  std::filesystem::create_directories(dir);
  if (emit == "csv" || emit == "both") {
    std::ofstream os(dir / "trace.csv");
    write_trace_csv(os, trace);
    if (!os) throw std::runtime_error("failed writing " + (dir / "trace.csv").string());
  }
  if (emit == "json" || emit == "both") {
    std::ofstream os(dir / "summary.json");
    write_summary_json(os, trace);
    if (!os) throw std::runtime_error("failed writing " + (dir / "summary.json").string());
  }
}

int fail(int code, const std::string& kind, const std::string& what) {
  std::string msg = what;
  for (char& ch : msg) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "error: " << kind << ": " << msg << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Distributed frequency-offset estimation simulator (BP / LSBP)"};
  Options o;
  app.add_option("--config", o.config_path, "Experiment config file (key = value)");
  app.add_option("--protocol", o.protocol, "Figure protocol batch: FIG1, FIG2 or FIG3");
  app.add_option("--algo", o.algo, "Override algorithm")->check(CLI::IsMember({"bp", "lsbp"}));
  app.add_option("--pdr", o.pdr, "Override packet delivery ratio");
  app.add_option("--seed", o.seed, "Override master seed");
  app.add_option("--iters", o.iters, "Override l_max");
  app.add_option("--trials", o.trials, "Override Monte-Carlo trial count");
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--emit", o.emit, "Output files")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
  app.add_flag("--oracle", o.oracle, "Attach WLS, CRLB and rho(K) to the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitValidation, "usage", e.what());
  }

  try {
    if (o.config_path.empty() == o.protocol.empty()) {
      throw ValidationError("exactly one of --config or --protocol is required");
    }
    std::vector<NamedConfig> batch;
    if (!o.config_path.empty()) {
      batch.push_back({"", load_config(o.config_path)});
    } else {
      batch = fig_protocols(parse_figure(o.protocol));
    }
    for (auto& [name, config] : batch) apply_overrides(config, o);

    bool diverged = false;
    for (const auto& [name, config] : batch) {
      const std::filesystem::path dir = name.empty() ? std::filesystem::path(o.out)
                                                     : std::filesystem::path(o.out) / name;
      const RunTrace trace = run_experiment(config);
      write_outputs(trace, dir, o.emit);
      if (!name.empty()) {
        std::ofstream cfg(dir / "config.cfg");
        cfg << to_config_text(config);
      }
      std::cout << (name.empty() ? to_string(config.algorithm) : name) << ": "
                << trace.records.back().iteration << " iterations, converged_at="
                << (trace.converged_at ? std::to_string(*trace.converged_at) : "none")
                << std::setprecision(6) << ", avg_mse=" << trace.final_mse();
      if (trace.oracle) std::cout << ", crlb=" << trace.oracle->crlb_avg;
      if (trace.diverged) std::cout << ", DIVERGED";
      std::cout << " -> " << dir.string() << '\n';
      diverged = diverged || (trace.diverged && config.algorithm == Algorithm::Bp);
    }
    if (diverged) return fail(kExitDiverged, "diverged", "BP run marked DIVERGED");
    return kExitOk;
  } catch (const ValidationError& e) {
    return fail(kExitValidation, "validation", e.what());
  } catch (const InvalidArgument& e) {
    return fail(kExitValidation, "validation", e.what());
  } catch (const GenerationFailure& e) {
    return fail(kExitValidation, "generation", e.what());
  } catch (const NumericFailure& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const UnobservableSystem& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const UndefinedMetric& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumeric, "internal", e.what());
  }
}

}  // namespace cfo
