#pragma once

// Random graph-feature payloads and graph transforms for encoder and augment
// property tests.

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "cadret/core/rng.hpp"
#include "cadret/encoder/encoder.hpp"
#include "cadret/features/features.hpp"
#include "support/generators.hpp"

namespace cadret::testing {

inline std::string node_name(const std::string& prefix, std::size_t i) {
  std::string digits = std::to_string(i);
  return prefix + std::string(4 - std::min<std::size_t>(digits.size(), 4), '0') + digits;
}

// Simple undirected graph on v nodes with each pair connected with
// probability p; ids are `prefix`0000, `prefix`0001, ...
inline brep::PartGraph random_graph(Rng& rng, std::size_t v, double p, const std::string& prefix = "f") {
  brep::PartGraph g;
  g.part_id = prefix + "part";
  for (std::size_t i = 0; i < v; ++i) g.nodes.push_back(node_name(prefix, i));
  for (std::uint32_t a = 0; a < v; ++a) {
    for (std::uint32_t b = a + 1; b < v; ++b) {
      if (rng.bernoulli(p)) g.edges.push_back({a, b, "c" + std::to_string(a) + "_" + std::to_string(b)});
    }
  }
  return g;
}

inline features::FaceRawFeatures random_face(Rng& rng, const features::GridSpec& grid, std::uint32_t surface_types) {
  features::FaceRawFeatures f;
  f.uv_grid = random_floats(rng, grid.face_floats());
  for (std::size_t i = features::kFaceChannels - 1; i < f.uv_grid.size(); i += features::kFaceChannels) {
    f.uv_grid[i] = rng.bernoulli(0.8) ? 1.0f : 0.0f;
  }
  f.surface_type = static_cast<std::uint32_t>(rng.index(surface_types));
  f.area = static_cast<float>(rng.uniform(0.01, 2));
  f.product = {{0, static_cast<float>(rng.index(5))}, {2, static_cast<float>(rng.uniform(-1.5, 1.5))}};
  return f;
}

inline features::CurveRawFeatures random_curve(Rng& rng, const features::GridSpec& grid, std::uint32_t curve_types) {
  features::CurveRawFeatures c;
  c.t_grid = random_floats(rng, grid.curve_floats());
  c.curve_type = static_cast<std::uint32_t>(rng.index(curve_types));
  c.length = static_cast<float>(rng.uniform(0.01, 3));
  return c;
}

inline features::GraphFeatures random_features(Rng& rng, brep::PartGraph graph, const features::GridSpec& grid,
                                               std::uint32_t surface_types = 6, std::uint32_t curve_types = 3) {
  features::GraphFeatures gf;
  gf.grid = grid;
  gf.product_layout = features::product_layout(features::default_schema());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) gf.nodes.push_back(random_face(rng, grid, surface_types));
  for (std::size_t i = 0; i < graph.edges.size(); ++i) gf.edges.push_back(random_curve(rng, grid, curve_types));
  gf.graph = std::move(graph);
  return gf;
}

// Same graph with node and edge lists shuffled; ids and features preserved.
inline features::GraphFeatures relabel(Rng& rng, const features::GraphFeatures& gf) {
  const std::size_t v = gf.graph.nodes.size();
  std::vector<std::uint32_t> perm(v);
  std::iota(perm.begin(), perm.end(), 0u);
  rng.shuffle(perm);  // new position i holds old node perm[i]
  std::vector<std::uint32_t> where(v);
  for (std::uint32_t i = 0; i < v; ++i) where[perm[i]] = i;
  features::GraphFeatures out = gf;
  for (std::uint32_t i = 0; i < v; ++i) {
    out.graph.nodes[i] = gf.graph.nodes[perm[i]];
    out.nodes[i] = gf.nodes[perm[i]];
  }
  std::vector<std::uint32_t> eperm(gf.graph.edges.size());
  std::iota(eperm.begin(), eperm.end(), 0u);
  rng.shuffle(eperm);
  for (std::size_t j = 0; j < eperm.size(); ++j) {
    brep::GraphEdge e = gf.graph.edges[eperm[j]];
    e.a = where[e.a];
    e.b = where[e.b];
    if (e.a > e.b) std::swap(e.a, e.b);
    out.graph.edges[j] = e;
    out.edges[j] = gf.edges[eperm[j]];
  }
  return out;
}

// Two disjoint copies; the copy's face ids get `copy_prefix`, which must sort
// after every original id.
inline features::GraphFeatures duplicate(const features::GraphFeatures& gf, const std::string& copy_prefix) {
  features::GraphFeatures out = gf;
  const auto v = static_cast<std::uint32_t>(gf.graph.nodes.size());
  for (std::uint32_t i = 0; i < v; ++i) {
    out.graph.nodes.push_back(copy_prefix + gf.graph.nodes[i]);
    out.nodes.push_back(gf.nodes[i]);
  }
  for (std::size_t j = 0; j < gf.graph.edges.size(); ++j) {
    const brep::GraphEdge& e = gf.graph.edges[j];
    out.graph.edges.push_back({e.a + v, e.b + v, copy_prefix + e.curve_id});
    out.edges.push_back(gf.edges[j]);
  }
  return out;
}

// BFS hop distances from `source`; unreachable nodes get SIZE_MAX.
inline std::vector<std::size_t> hop_distances(const brep::PartGraph& g, std::uint32_t source) {
  const auto adj = g.adjacency();
  std::vector<std::size_t> dist(g.nodes.size(), SIZE_MAX);
  std::queue<std::uint32_t> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const std::uint32_t u = q.front();
    q.pop();
    for (std::uint32_t w : adj[u]) {
      if (dist[w] == SIZE_MAX) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

// Small plan for finite-difference checks: every parameter is checked.
inline encoder::EncoderConfig tiny_config() {
  encoder::EncoderConfig c;
  c.node_dim = 8;
  c.graph_dim = 6;
  c.layers = 2;
  c.node_uv = 4;
  c.node_geo = 2;
  c.node_product = 2;
  c.edge_uv = 6;
  c.edge_geo = 2;
  c.cnn2d_channels = {2, 3};
  c.cnn1d_channels = {2, 3};
  c.geo_hidden = 3;
  c.product_hidden = 3;
  c.grid = {4, 4, 4};
  return c;
}

}  // namespace cadret::testing
