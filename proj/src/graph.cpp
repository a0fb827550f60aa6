#include "cfo/graph.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cfo/errors.hpp"
#include "cfo/rng.hpp"

namespace cfo {

Graph Graph::with_agents(std::size_t n, AgentId reference) {
  Graph g;
  for (std::size_t k = 0; k < n; ++k) g.add_agent();
  g.set_reference(reference);
  return g;
}

AgentId Graph::add_agent(std::optional<Position> pos) {
  AgentId id = next_id_++;
  agents_[id].position = pos;
  return id;
}

void Graph::add_edge(AgentId i, AgentId j) {
  if (i == j) throw InvalidArgument("self-loop on agent " + std::to_string(i));
  if (!has_agent(i) || !has_agent(j)) {
    throw InvalidArgument("edge " + std::to_string(i) + "-" + std::to_string(j) +
                          " references an unknown agent");
  }
  edges_.insert(Edge{i, j});
  agents_[i].neighbors.insert(j);
  agents_[j].neighbors.insert(i);
}

void Graph::set_position(AgentId i, Position pos) {
  if (!has_agent(i)) throw InvalidArgument("unknown agent " + std::to_string(i));
  agents_[i].position = pos;
}

void Graph::set_reference(AgentId i) {
  if (!has_agent(i)) throw InvalidArgument("reference " + std::to_string(i) + " is not an agent");
  reference_ = i;
}

const Graph::Node& Graph::node(AgentId i) const {
  auto it = agents_.find(i);
  if (it == agents_.end()) throw InvalidArgument("unknown agent " + std::to_string(i));
  return it->second;
}

const std::set<AgentId>& Graph::neighbors(AgentId i) const { return node(i).neighbors; }

std::optional<Position> Graph::position(AgentId i) const { return node(i).position; }

std::vector<AgentId> Graph::agents() const {
  std::vector<AgentId> out;
  out.reserve(agents_.size());
  for (const auto& [id, n] : agents_) out.push_back(id);
  return out;
}

std::vector<AgentId> Graph::non_reference_agents() const {
  std::vector<AgentId> out;
  out.reserve(agents_.size());
  for (const auto& [id, n] : agents_) {
    if (id != reference_) out.push_back(id);
  }
  return out;
}

std::vector<AgentId> Graph::unreachable_agents() const {
  std::set<AgentId> seen;
  if (has_agent(reference_)) {
    std::deque<AgentId> queue{reference_};
    seen.insert(reference_);
    while (!queue.empty()) {
      AgentId cur = queue.front();
      queue.pop_front();
      for (AgentId n : agents_.at(cur).neighbors) {
        if (seen.insert(n).second) queue.push_back(n);
      }
    }
  }
  std::vector<AgentId> out;
  for (const auto& [id, n] : agents_) {
    if (!seen.contains(id)) out.push_back(id);
  }
  return out;
}

bool Graph::is_connected() const { return unreachable_agents().empty(); }

bool is_connected(const Graph& g) { return g.is_connected(); }

Graph Graph::remove_agent(AgentId i) const {
  if (!has_agent(i)) throw InvalidArgument("unknown agent " + std::to_string(i));
  if (i == reference_) throw InvalidArgument("the reference agent cannot leave");
  Graph g = *this;
  for (AgentId n : g.agents_[i].neighbors) {
    g.agents_[n].neighbors.erase(i);
    g.edges_.erase(Edge{i, n});
  }
  g.agents_.erase(i);
  return g;
}

std::pair<Graph, AgentId> Graph::add_agent(Position pos, double radius) const {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  Graph g = *this;
  AgentId id = g.add_agent(pos);
  for (const auto& [other, n] : agents_) {
    if (!n.position) continue;
    if (std::hypot(n.position->x - pos.x, n.position->y - pos.y) <= radius) g.add_edge(id, other);
  }
  return {std::move(g), id};
}

Graph random_geometric(const GeometricParams& p) {
  if (p.agents < 2) throw InvalidArgument("random_geometric needs at least 2 agents");
  if (!(p.radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (!(p.width > 0.0) || !(p.height > 0.0)) throw InvalidArgument("area must be positive");

  for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
    Rng rng = make_rng(derive_seed(p.seed, "topology", static_cast<std::uint64_t>(attempt)));
    std::uniform_real_distribution<double> ux(0.0, p.width);
    std::uniform_real_distribution<double> uy(0.0, p.height);

    Graph g;
    for (std::size_t k = 0; k < p.agents; ++k) {
      double x = ux(rng);
      double y = uy(rng);
      g.add_agent(Position{x, y});
    }
    g.set_reference(1);
    const double r2 = p.radius * p.radius;
    for (AgentId i = 1; i <= p.agents; ++i) {
      const Position a = *g.position(i);
      for (AgentId j = i + 1; j <= p.agents; ++j) {
        const Position b = *g.position(j);
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        if (dx * dx + dy * dy <= r2) g.add_edge(i, j);
      }
    }
    if (g.is_connected()) return g;
  }
  throw GenerationFailure("no connected random geometric graph within " +
                          std::to_string(p.max_attempts) + " attempts");
}

void write_edge_list(std::ostream& os, const Graph& g) {
  const auto ids = g.agents();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] != k + 1) throw InvalidArgument("edge list needs contiguous agent ids 1..N");
  }
  os << "N " << ids.size() << " REF " << g.reference() << '\n';
  for (const Edge& e : g.edges()) os << e.lo << ' ' << e.hi << '\n';
  os.precision(17);
  for (AgentId id : ids) {
    if (auto p = g.position(id)) os << "POS " << id << ' ' << p->x << ' ' << p->y << '\n';
  }
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  Graph g;
  bool have_header = false;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) -> ValidationError {
    return ValidationError("edge list line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (!have_header) {
      std::size_t n = 0;
      std::string ref_tag;
      AgentId ref = 0;
      if (head != "N" || !(ls >> n >> ref_tag >> ref) || ref_tag != "REF") {
        throw fail("expected header 'N <count> REF <id>'");
      }
      g = Graph::with_agents(n, 1);
      try {
        g.set_reference(ref);
      } catch (const InvalidArgument& e) {
        throw fail(e.what());
      }
      have_header = true;
      continue;
    }
    try {
      if (head == "POS") {
        AgentId id = 0;
        double x = 0.0, y = 0.0;
        if (!(ls >> id >> x >> y)) throw fail("malformed POS line");
        g.set_position(id, Position{x, y});
      } else {
        AgentId i = 0, j = 0;
        std::istringstream es(line);
        if (!(es >> i >> j)) throw fail("malformed edge line");
        g.add_edge(i, j);
      }
    } catch (const InvalidArgument& e) {
      throw fail(e.what());
    }
  }
  if (!have_header) throw ValidationError("edge list: missing header");
  return g;
}

}  // namespace cfo
