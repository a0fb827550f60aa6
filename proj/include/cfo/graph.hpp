#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cfo/types.hpp"

namespace cfo {

// Undirected communication graph with stable agent ids. Ids of removed agents
// are never handed out again.
class Graph {
 public:
  Graph() = default;

  // Agents 1..n, no edges.
  static Graph with_agents(std::size_t n, AgentId reference = 1);

  AgentId add_agent(std::optional<Position> pos = std::nullopt);
  void add_edge(AgentId i, AgentId j);
  void set_position(AgentId i, Position pos);
  void set_reference(AgentId i);

  bool has_agent(AgentId i) const { return agents_.contains(i); }
  bool has_edge(AgentId i, AgentId j) const { return edges_.contains(Edge{i, j}); }

  const std::set<AgentId>& neighbors(AgentId i) const;
  std::optional<Position> position(AgentId i) const;

  AgentId reference() const noexcept { return reference_; }
  std::size_t num_agents() const noexcept { return agents_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  std::vector<AgentId> agents() const;
  // Agents other than the reference, ascending.
  std::vector<AgentId> non_reference_agents() const;
  AgentId next_id() const noexcept { return next_id_; }

  // True iff every agent is reachable from the reference.
  bool is_connected() const;
  // Agents not reachable from the reference, ascending.
  std::vector<AgentId> unreachable_agents() const;

  Graph remove_agent(AgentId i) const;
  // Fresh id; connects to every positioned agent within `radius`.
  std::pair<Graph, AgentId> add_agent(Position pos, double radius) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  struct Node {
    std::set<AgentId> neighbors;
    std::optional<Position> position;
    friend bool operator==(const Node&, const Node&) = default;
  };

  const Node& node(AgentId i) const;

  std::map<AgentId, Node> agents_;
  std::set<Edge> edges_;
  AgentId reference_ = 1;
  AgentId next_id_ = 1;
};

bool is_connected(const Graph& g);

struct GeometricParams {
  std::size_t agents = 100;
  double width = 3000.0;   // m
  double height = 4000.0;  // m
  double radius = 1000.0;  // m
  std::uint64_t seed = 0;
  int max_attempts = 100;
};

// Uniform placement, edge iff distance <= radius. Re-seeds (bounded) until the
// graph is connected; throws GenerationFailure otherwise.
Graph random_geometric(const GeometricParams& params);

// Text edge list: "N <n> REF <ref>", then "i j" per edge and optional
// "POS i x y" lines. Agent ids must be contiguous 1..N.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace cfo
