#include <cmath>
#include <sstream>

#include "cfo/errors.hpp"
#include "cfo/model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cfo;

TEST_CASE("truth generation") {
  const Graph g = test::complete(6);
  const GroundTruth zero = generate_truth(g, 0.0, 1);
  for (const auto& [i, f] : zero.offsets) CHECK(f == 0.0);
  CHECK(generate_truth(g, 200.0, 9).offsets == generate_truth(g, 200.0, 9).offsets);
  for (const auto& [i, f] : generate_truth(g, 200.0, 9).offsets) CHECK(std::abs(f) <= 200.0);
}

TEST_CASE("doppler-scale sanity of the default offset range") {
  const double v = 30.0, f0 = 2.4e9, c = 3e8;
  CHECK(v * f0 / c == doctest::Approx(240.0));
}

TEST_CASE("noiseless measurement is the sum of offsets") {
  Graph g = Graph::with_agents(2);
  g.add_edge(1, 2);
  GroundTruth t{{{1, 10.0}, {2, -3.0}}, 1};
  NoiseSpec noise{.sigma = 0.0};
  const MeasurementSet ms = generate_measurements(g, t, noise, 4);
  CHECK(ms.at(1, 2).r == 7.0);
  CHECK(ms.at(2, 1).r == 7.0);
  CHECK(ms.at(1, 2).sigma2 == 1e-12);
}

TEST_CASE("empty edge set gives no measurements") {
  const Graph g = Graph::with_agents(4);
  CHECK(generate_measurements(g, generate_truth(g, 200, 1), NoiseSpec{}, 2).empty());
}

TEST_CASE("noise moments") {
  // 10^5 edges via repeated draws on a fixed truth
  Graph g = Graph::with_agents(2);
  g.add_edge(1, 2);
  GroundTruth t{{{1, 3.5}, {2, -8.25}}, 1};
  NoiseSpec noise{.sigma = 1.0};
  Rng rng = make_rng(2024);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double e = draw_measurement(Edge{1, 2}, t, noise, rng).r - 3.5 + 8.25;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("noise seed does not touch truth") {
  const Graph g = test::complete(5);
  const GroundTruth t = generate_truth(g, 200, 3);
  const auto a = generate_measurements(g, t, NoiseSpec{}, 1);
  const auto b = generate_measurements(g, t, NoiseSpec{}, 2);
  CHECK_FALSE(a == b);
  CHECK(generate_truth(g, 200, 3).offsets == t.offsets);
}

TEST_CASE("per-edge sigma overrides") {
  NoiseSpec noise;
  noise.sigma_overrides[Edge{2, 1}] = 0.5;
  CHECK(noise.stored_sigma2(Edge{1, 2}) == 0.25);
  CHECK(noise.stored_sigma2(Edge{1, 3}) == 1.0);
}

TEST_CASE("measurement set bookkeeping") {
  MeasurementSet ms = test::measurements({{Edge{1, 2}, 1.0, 1.0}, {Edge{2, 3}, 2.0, 1.0}});
  CHECK(ms.find(3, 2)->r == 2.0);
  CHECK(ms.find(1, 3) == nullptr);
  CHECK_THROWS_AS(ms.at(1, 3), InconsistentState);
  ms.erase_incident(2);
  CHECK(ms.empty());
}

TEST_CASE("csv round trips") {
  const Graph g = test::complete(4);
  const GroundTruth t = generate_truth(g, 200, 8);
  const MeasurementSet ms = generate_measurements(g, t, NoiseSpec{}, 9);
  std::stringstream a, b;
  write_measurements_csv(a, ms);
  write_truth_csv(b, t);
  CHECK(read_measurements_csv(a) == ms);
  CHECK(read_truth_csv(b, 1).offsets == t.offsets);
}
