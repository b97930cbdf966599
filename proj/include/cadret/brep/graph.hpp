#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadret/brep/part.hpp"

namespace cadret::brep {

struct GraphEdge {
  std::uint32_t a = 0;  // node indices, a < b
  std::uint32_t b = 0;
  std::string curve_id;  // curve the edge originates from
};

// Face adjacency graph: one node per face, one undirected edge per adjacent
// face pair. Simple graph: no self-loops, no parallel edges.
struct PartGraph {
  std::string part_id;
  std::vector<std::string> nodes;  // face ids
  std::vector<GraphEdge> edges;

  std::vector<std::vector<std::uint32_t>> adjacency() const;
};

struct ConversionReport {
  std::vector<std::string> single_face_curves;  // seam / bus lines: no edge
  std::vector<std::string> orphan_curves;       // no adjacent face
  std::vector<std::string> multi_face_curves;   // > 2 adjacent faces: pairwise edges
  std::size_t duplicate_pairs = 0;              // face pairs already connected by an earlier curve
};

struct Conversion {
  PartGraph graph;
  ConversionReport report;
};

// Nodes follow face order; edges follow curve order, and for a curve with
// more than two adjacent faces the pairs are emitted in adjacency-list order.
Conversion to_graph(const BRepPart& part);

// Throws Error(Contract) if the graph has self-loops, duplicates or dangling ends.
void validate(const PartGraph& graph);

}  // namespace cadret::brep
