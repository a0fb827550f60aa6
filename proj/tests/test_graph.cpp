#include <random>
#include <sstream>

#include "cfo/errors.hpp"
#include "cfo/graph.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cfo;
using cfo::test::complete;
using cfo::test::path3;
using cfo::test::triangle;

TEST_CASE("neighbors") {
  CHECK(triangle().neighbors(2) == std::set<AgentId>{1, 3});
  CHECK(path3().neighbors(3) == std::set<AgentId>{2});
  const Graph k5 = complete(5);
  for (AgentId i : k5.agents()) CHECK(k5.neighbors(i).size() == 4);
  CHECK_THROWS_AS(k5.neighbors(9), InvalidArgument);
}

TEST_CASE("connectivity") {
  CHECK(is_connected(triangle()));
  Graph two = Graph::with_agents(4);
  two.add_edge(1, 2);
  two.add_edge(3, 4);
  CHECK_FALSE(is_connected(two));
  CHECK(two.unreachable_agents() == std::vector<AgentId>{3, 4});
  CHECK(is_connected(Graph::with_agents(1)));
}

TEST_CASE("random geometric graphs") {
  GeometricParams p;
  p.seed = 7;
  const Graph a = random_geometric(p);
  const Graph b = random_geometric(p);
  CHECK(a.num_agents() == 100);
  CHECK(is_connected(a));
  CHECK(a == b);
  CHECK(a.edges() == b.edges());

  GeometricParams pair{.agents = 2, .width = 3000, .height = 4000, .radius = 5000, .seed = 1};
  const Graph g2 = random_geometric(pair);
  CHECK(g2.edges() == std::set<Edge>{Edge{1, 2}});

  GeometricParams tiny{.agents = 10, .radius = 0.001, .seed = 1, .max_attempts = 5};
  CHECK_THROWS_AS(random_geometric(tiny), GenerationFailure);
}

TEST_CASE("remove and add agents") {
  const Graph t = triangle().remove_agent(3);
  CHECK(t.edges() == std::set<Edge>{Edge{1, 2}});
  CHECK_FALSE(t.has_agent(3));
  CHECK_THROWS_AS(triangle().remove_agent(1), InvalidArgument);

  GeometricParams p;
  p.seed = 7;
  const Graph g = random_geometric(p);
  const AgentId victim = 17;
  const Position where = *g.position(victim);
  std::set<AgentId> before = g.neighbors(victim);
  const Graph without = g.remove_agent(victim);
  auto [back, id] = without.add_agent(where, p.radius);
  CHECK(id == 101);
  CHECK(back.neighbors(id) == before);

  Graph star = Graph::with_agents(5);
  for (AgentId i = 2; i <= 5; ++i) star.add_edge(1, i);
  const Graph smaller = star.remove_agent(4);
  CHECK(smaller.num_edges() == 3);
  CHECK(is_connected(smaller));
}

TEST_CASE("removed ids are never reused") {
  Graph g = triangle().remove_agent(3);
  CHECK(g.add_agent() == 4);
}

TEST_CASE("adjacency is symmetric and degrees sum to twice the edges") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Graph g = cfo::test::random_connected(3 + t, t, rng);
    std::size_t degree_sum = 0;
    for (AgentId i : g.agents()) {
      degree_sum += g.neighbors(i).size();
      for (AgentId j : g.neighbors(i)) CHECK(g.neighbors(j).contains(i));
    }
    CHECK(degree_sum == 2 * g.num_edges());
  }
}

TEST_CASE("edge list round trip") {
  GeometricParams p{.agents = 12, .radius = 2000, .seed = 3};
  const Graph g = random_geometric(p);
  std::stringstream ss;
  write_edge_list(ss, g);
  const Graph back = read_edge_list(ss);
  CHECK(back.edges() == g.edges());
  CHECK(back.reference() == g.reference());
  for (AgentId i : g.agents()) {
    CHECK(back.position(i)->x == g.position(i)->x);
    CHECK(back.position(i)->y == g.position(i)->y);
  }
  std::istringstream bad("N 3 REF 1\n1 7\n");
  CHECK_THROWS(read_edge_list(bad));
}
