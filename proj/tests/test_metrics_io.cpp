#include <cmath>
#include <sstream>

#include "cfo/config.hpp"
#include "cfo/errors.hpp"
#include "cfo/metrics.hpp"
#include "cfo/netsim.hpp"
#include "cfo/trace_io.hpp"
#include "doctest.h"

using namespace cfo;

TEST_CASE("avg_mse") {
  const std::map<AgentId, double> truth{{2, 1.0}, {3, -2.0}};
  const double B = 4.0;
  CHECK(avg_mse({{2, 1.0}, {3, -2.0}}, truth, B).value == 0.0);
  CHECK(avg_mse({{2, 1.0 + B}}, truth, B).value == doctest::Approx(1.0));
  const auto half = avg_mse({{2, 1.0 + B}, {3, -2.0}}, truth, B);
  CHECK(half.value == doctest::Approx(0.5));
  const auto partial = avg_mse({{2, 1.0 + B}, {3, std::nullopt}}, truth, B);
  CHECK(partial.agents == 1);
  CHECK(partial.excluded == 1);
  CHECK_THROWS_AS(avg_mse({{2, std::nullopt}}, truth, B), UndefinedMetric);
}

TEST_CASE("avg_mse ignores agent labels") {
  const auto a = avg_mse({{2, 3.0}, {3, 5.0}}, {{2, 1.0}, {3, 4.0}}, 1.0);
  const auto b = avg_mse({{7, 5.0}, {9, 3.0}}, {{7, 4.0}, {9, 1.0}}, 1.0);
  CHECK(a.value == b.value);
}

TEST_CASE("config parsing") {
  std::istringstream is(R"(# triangle
topology = edges
num_agents = 3
edges = 1-2, 1-3, 2-3
sigma = 0.5
algorithm = bp
pdr = 0.75
timeline = 4 leave 3; 6 join @3
)");
  const ExperimentConfig c = parse_config(is);
  CHECK(c.topology == TopologyKind::Inline);
  CHECK(c.edges.size() == 3);
  CHECK(c.noise.sigma == 0.5);
  CHECK(c.algorithm == Algorithm::Bp);
  CHECK(c.network.pdr == 0.75);
  REQUIRE(c.timeline.size() == 2);
  CHECK(c.timeline[1].kind == TimelineEvent::Kind::Join);

  std::istringstream again(to_config_text(c));
  const ExperimentConfig d = parse_config(again);
  CHECK(to_config_text(d) == to_config_text(c));
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return parse_config(is);
  };
  CHECK_THROWS_AS(parse("bogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("pdr = 0.5\npdr = 0.6\n"), ValidationError);
  CHECK_THROWS_AS(parse("pdr = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(parse("pdr = lots\n"), ValidationError);
  CHECK_THROWS_AS(parse("monte_carlo_trials = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("no equals sign\n"), ValidationError);
  CHECK_THROWS_AS(parse("timeline = 5 vanish 3\n"), ValidationError);
}

TEST_CASE("figure protocols") {
  const auto f1 = fig_protocols(FigureProtocol::Fig1);
  REQUIRE(f1.size() == 5);
  std::set<double> p0;
  for (const auto& nc : f1) {
    p0.insert(nc.config.init.variance);
    CHECK(nc.config.init.mode == InitMode::UniformVariance);
    ExperimentConfig same = nc.config;
    same.init.variance = f1[0].config.init.variance;
    CHECK(to_config_text(same) == to_config_text(f1[0].config));
  }
  CHECK(p0 == std::set<double>{100, 10, 1, 0.1, 0.01});

  const auto f2 = fig_protocols(FigureProtocol::Fig2);
  CHECK(f2.size() == 4);

  const auto f3 = fig_protocols(FigureProtocol::Fig3, ProtocolOverrides{.l_max = 20});
  for (const auto& nc : f3) {
    CHECK(nc.config.l_max == 20);
    CHECK(nc.config.timeline.size() == 8);
  }
  CHECK(parse_figure("FIG2") == FigureProtocol::Fig2);
  CHECK_THROWS_AS(parse_figure("FIG9"), ValidationError);
}

TEST_CASE("trace and summary round trip") {
  ExperimentConfig c;
  c.rgg.agents = 15;
  c.rgg.width = 1000;
  c.rgg.height = 1000;
  c.rgg.radius = 600;
  c.network.pdr = 0.8;
  c.monte_carlo_trials = 2;
  c.oracle = true;
  c.l_max = 40;
  const RunTrace t = run_experiment(c);

  std::stringstream csv;
  write_trace_csv(csv, t);
  CHECK(same_records(read_trace_csv(csv), t.records));

  std::stringstream js;
  write_summary_json(js, t);
  const Summary s = read_summary_json(js);
  CHECK(s.iterations == t.records.back().iteration);
  CHECK(s.converged_at == t.converged_at);
  CHECK(s.mse_avg.value() == t.records.back().avg_mse);
  CHECK(s.estimates == t.estimates);
  CHECK(s.wls == t.oracle->wls);
  CHECK(s.rho_k.value() == t.oracle->rho_k);
}
