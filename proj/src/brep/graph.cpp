#include "cadret/brep/graph.hpp"

#include <set>
#include <unordered_map>
#include <utility>

#include "cadret/core/error.hpp"

namespace cadret::brep {

std::vector<std::vector<std::uint32_t>> PartGraph::adjacency() const {
  std::vector<std::vector<std::uint32_t>> adj(nodes.size());
  for (const GraphEdge& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  return adj;
}

Conversion to_graph(const BRepPart& part) {
  Conversion out;
  out.graph.part_id = part.id;
  std::unordered_map<std::string_view, std::uint32_t> index;
  for (const Face& f : part.faces) {
    index.emplace(f.id, static_cast<std::uint32_t>(out.graph.nodes.size()));
    out.graph.nodes.push_back(f.id);
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  auto connect = [&](std::uint32_t x, std::uint32_t y, const std::string& curve_id) {
    auto key = std::minmax(x, y);
    if (!seen.insert(key).second) {
      ++out.report.duplicate_pairs;
      return;
    }
    out.graph.edges.push_back({key.first, key.second, curve_id});
  };

  for (const Curve& c : part.curves) {
    const auto& adj = c.adjacent_faces;
    if (adj.empty()) {
      out.report.orphan_curves.push_back(c.id);
      continue;
    }
    if (adj.size() == 1) {
      out.report.single_face_curves.push_back(c.id);
      continue;
    }
    if (adj.size() > 2) out.report.multi_face_curves.push_back(c.id);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        connect(index.at(adj[i]), index.at(adj[j]), c.id);
      }
    }
  }
  return out;
}

void validate(const PartGraph& graph) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  const auto n = static_cast<std::uint32_t>(graph.nodes.size());
  for (const GraphEdge& e : graph.edges) {
    require(e.a < n && e.b < n, ErrorKind::Contract,
            "graph '" + graph.part_id + "': edge from curve '" + e.curve_id + "' has a dangling end");
    require(e.a != e.b, ErrorKind::Contract,
            "graph '" + graph.part_id + "': self-loop from curve '" + e.curve_id + "'");
    require(seen.insert(std::minmax(e.a, e.b)).second, ErrorKind::Contract,
            "graph '" + graph.part_id + "': duplicate edge from curve '" + e.curve_id + "'");
  }
}

}  // namespace cadret::brep
