#include <cmath>
#include <random>

#include "cfo/errors.hpp"
#include "cfo/lsbp.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cfo;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

InfoGaussian pinned(double mean) { return InfoGaussian::from_info(1e12, 1e12 * mean); }

LsbpNetwork converge(LsbpNetwork net, Schedule schedule, std::uint64_t seed, int max_rounds,
                     int* rounds = nullptr) {
  PerfectChannel ch;
  Rng rng = make_rng(seed);
  auto prev = net.beliefs();
  for (int k = 1; k <= max_rounds; ++k) {
    net.round(ch, schedule, &rng);
    auto cur = net.beliefs();
    if (snapshots_settled(prev, cur, 1e-12, 1e-12)) {
      if (rounds) *rounds = k;
      return net;
    }
    prev = std::move(cur);
  }
  FAIL("no convergence");
  return net;
}

}  // namespace

TEST_CASE("incoming message from a cached broadcast") {
  const auto golden = lsbp_incoming(InfoGaussian::from_moments(0.0, kGolden),
                                    Measurement{Edge{1, 2}, 0.0, 1.0});
  CHECK(golden.mean() == doctest::Approx(0.0));
  CHECK(golden.variance() == doctest::Approx(1.0 + kGolden));

  const auto ref = lsbp_incoming(pinned(2.0), Measurement{Edge{1, 2}, 7.0, 1.0});
  CHECK(ref.mean() == doctest::Approx(5.0));
  CHECK(ref.variance() == doctest::Approx(1.0));

  CHECK(lsbp_incoming(InfoGaussian::flat(), Measurement{Edge{1, 2}, 7.0, 1.0}).is_flat());
}

TEST_CASE("belief update from the inbox") {
  SUBCASE("only the reference") {
    LsbpAgentState s;
    s.inbox[1] = InboxEntry{pinned(2.0), 1};
    const auto b = lsbp_update_belief(2, s, test::measurements({{Edge{1, 2}, 9.0, 1.0}}));
    CHECK(b.variance() == doctest::Approx(1.0));
    CHECK(b.mean() == doctest::Approx(7.0));
  }
  SUBCASE("two neighbours") {
    LsbpAgentState s;
    s.inbox[1] = InboxEntry{pinned(2.0), 1};
    s.inbox[3] = InboxEntry{InfoGaussian::from_moments(-1.0, kGolden), 1};
    const auto ms = test::measurements({{Edge{1, 2}, 7.0, 1.0}, {Edge{2, 3}, 4.0, 1.0}});
    const auto b = lsbp_update_belief(2, s, ms);
    CHECK(b.variance() == doctest::Approx(1.0 / (1.0 + 1.0 / (1.0 + kGolden))));
    CHECK(b.variance() == doctest::Approx(kGolden));
    CHECK(b.mean() == doctest::Approx(5.0));
  }
  SUBCASE("all flat") {
    LsbpAgentState s;
    s.inbox[1] = InboxEntry{};
    s.inbox[3] = InboxEntry{};
    const auto ms = test::measurements({{Edge{1, 2}, 7.0, 1.0}, {Edge{2, 3}, 4.0, 1.0}});
    CHECK(lsbp_update_belief(2, s, ms).is_flat());
  }
}

TEST_CASE("variance map") {
  const Graph g = test::triangle();
  const auto ms = test::measurements({{Edge{1, 2}, 0, 1}, {Edge{1, 3}, 0, 1}, {Edge{2, 3}, 0, 1}});
  const std::vector<double> zero{0.0, 0.0};
  const auto f0 = variance_map(g, ms, zero);
  CHECK(f0[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(f0[1] == doctest::Approx(1.0).epsilon(1e-11));

  const auto p = variance_fixed_point(g, ms, zero);
  CHECK(std::abs(1.0 / p[0] - kGolden) < 1e-10);
  CHECK(std::abs(1.0 / p[1] - kGolden) < 1e-10);

  Graph lonely = Graph::with_agents(3);
  lonely.add_edge(1, 2);
  const auto fl = variance_map(lonely, test::measurements({{Edge{1, 2}, 0, 1}}), zero);
  CHECK(fl[1] == 0.0);

  CHECK_THROWS_AS(variance_map(g, ms, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("feasible initial values") {
  const Graph g = test::triangle();
  const auto ms = test::measurements({{Edge{1, 2}, 0, 1}, {Edge{1, 3}, 0, 1}, {Edge{2, 3}, 0, 1}});
  const std::vector<double> zero{0.0, 0.0};
  CHECK(is_feasible_init(g, ms, zero));
  CHECK(is_feasible_init(g, ms, variance_map(g, ms, zero)));
  const auto star = variance_fixed_point(g, ms, zero);
  const std::vector<double> mixed{star[0] * 1.5, star[1] * 0.5};
  CHECK_FALSE(is_feasible_init(g, ms, mixed));
}

TEST_CASE("one synchronous round on a single edge") {
  Graph g = Graph::with_agents(2);
  g.add_edge(1, 2);
  LsbpNetwork net(g, test::measurements({{Edge{1, 2}, 7.0, 2.0}}), LsbpOptions{.reference_mean = 3.0});
  net.round();
  CHECK(net.belief(2).mean() == doctest::Approx(4.0));
  CHECK(net.belief(2).variance() == doctest::Approx(2.0));
}

TEST_CASE("one broadcast per agent") {
  std::mt19937_64 rng(2);
  GroundTruth t;
  const Graph g = test::complete(10);
  LsbpNetwork net(g, test::random_measurements(g, t, 1, 1, rng));
  const auto c = net.round();
  CHECK(c.broadcasts == 10);
  CHECK(c.point_to_point == 0);
  CHECK(c.deliveries == 90);
}

TEST_CASE("synchronous and asynchronous schedules share the fixed point") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const Graph g = test::random_connected(15, 12, rng);
    GroundTruth truth;
    const auto ms = test::random_measurements(g, truth, 0.5, 2, rng);
    const LsbpNetwork start(g, ms, LsbpOptions{.reference_mean = truth.reference_value()});
    const auto sync = converge(start, Schedule::Synchronous, 1, 20000).estimates();
    const auto async = converge(start, Schedule::Asynchronous, 2, 20000).estimates();
    for (const auto& [i, m] : sync) CHECK(std::abs(*m - *async.at(i)) < 1e-9);
  }
}

TEST_CASE("detect_convergence") {
  const BeliefSnapshot a{{1, pinned(0)}, {2, InfoGaussian::from_moments(1, 1)}};
  const BeliefSnapshot b{{1, pinned(0)}, {2, InfoGaussian::from_moments(4, 1)}};
  SUBCASE("constant") {
    std::vector<BeliefSnapshot> trace(4, a);
    CHECK(detect_convergence(trace) == 1u);
  }
  SUBCASE("one jump") {
    std::vector<BeliefSnapshot> trace{a, a, a, a, a, b, b, b};
    CHECK(detect_convergence(trace) == 6u);
  }
  SUBCASE("never") {
    std::vector<BeliefSnapshot> trace{a, b, a, b};
    CHECK_FALSE(detect_convergence(trace).has_value());
  }
  SUBCASE("flat to informative counts as movement") {
    const BeliefSnapshot f{{1, pinned(0)}, {2, InfoGaussian::flat()}};
    std::vector<BeliefSnapshot> trace{f, a, a};
    CHECK(detect_convergence(trace) == 2u);
  }
  SUBCASE("triangle settles quickly") {
    const auto ms = test::measurements({{Edge{1, 2}, 4, 1}, {Edge{1, 3}, 1, 1}, {Edge{2, 3}, 2, 1}});
    LsbpNetwork net(test::triangle(), ms);
    std::vector<BeliefSnapshot> trace{net.beliefs()};
    for (int k = 0; k < 100; ++k) {
      net.round();
      trace.push_back(net.beliefs());
    }
    const auto at = detect_convergence(trace);
    REQUIRE(at.has_value());
    CHECK(*at <= 60u);
  }
}

TEST_CASE("variance recursion is ordered and monotone") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 10; ++t) {
    const Graph g = test::random_connected(10, 8, rng);
    GroundTruth truth;
    const auto ms = test::random_measurements(g, truth, 0.25, 4, rng);
    const std::size_t n = g.non_reference_agents().size();
    const auto f0 = variance_map(g, ms, std::vector<double>(n, 0.0));
    for (int k = 0; k < 10; ++k) {
      std::vector<double> q(n), p(n);
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = u(rng);
        p[i] = q[i] + u(rng);
      }
      const auto fq = variance_map(g, ms, q);
      const auto fp = variance_map(g, ms, p);
      std::vector<double> p2(n);
      for (std::size_t i = 0; i < n; ++i) p2[i] = 2.0 * p[i];
      const auto f2p = variance_map(g, ms, p2);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(fq[i] > 0.0);
        CHECK(fp[i] >= fq[i]);
        CHECK(fq[i] >= f0[i]);
        CHECK(2.0 * fp[i] > f2p[i]);
      }
    }
  }
}

TEST_CASE("topology changes purge departed neighbours") {
  const auto ms = test::measurements({{Edge{1, 2}, 4, 1}, {Edge{1, 3}, 1, 1}, {Edge{2, 3}, 2, 1}});
  LsbpNetwork net(test::triangle(), ms);
  net.round();
  net.round();
  MeasurementSet rest = ms;
  rest.erase_incident(3);
  net.set_topology(test::triangle().remove_agent(3), rest);
  CHECK_FALSE(net.agent(2).inbox.contains(3));
  net.round();
  CHECK(net.belief(2).mean() == doctest::Approx(4.0));
}
