#include "cadret/augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include "cadret/core/error.hpp"

namespace cadret::augment {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::Node: return "node";
    case Scheme::Node1Hop: return "node_1hop";
    case Scheme::EdgeVertices: return "edge_vertices";
  }
  return "node";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (Scheme s : {Scheme::Node, Scheme::Node1Hop, Scheme::EdgeVertices}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

void validate(const AugmentConfig& cfg) {
  require(cfg.alpha >= 0 && cfg.alpha <= 0.2, ErrorKind::Config,
          "augment alpha " + std::to_string(cfg.alpha) + " outside [0, 0.2]");
  require(cfg.beta >= 0 && cfg.beta <= 0.2, ErrorKind::Config,
          "augment beta " + std::to_string(cfg.beta) + " outside [0, 0.2]");
}

nlohmann::json config_to_json(const AugmentConfig& cfg) {
  return {{"alpha", cfg.alpha}, {"beta", cfg.beta}, {"scheme", to_string(cfg.scheme)}, {"seed", cfg.seed}};
}

AugmentConfig config_from_json(const nlohmann::json& j) {
  AugmentConfig cfg;
  try {
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scheme")) {
      const std::string name = j.at("scheme").get<std::string>();
      const auto s = parse_scheme(name);
      require(s.has_value(), ErrorKind::Config, "unknown augment scheme '" + name + "'");
      cfg.scheme = *s;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("augment config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

features::GraphFeatures mask_features(const features::GraphFeatures& gf, double alpha, Rng& rng, MaskStats* stats) {
  features::GraphFeatures out = gf;
  MaskStats local;
  auto draw = [&] {
    ++local.groups;
    const bool hit = rng.bernoulli(alpha);
    local.masked += hit;
    return hit;
  };
  for (features::FaceRawFeatures& f : out.nodes) {
    if (draw()) std::fill(f.uv_grid.begin(), f.uv_grid.end(), 0.0f);
    if (draw()) f.area = 0;
    if (draw()) f.product.clear();
  }
  for (features::CurveRawFeatures& c : out.edges) {
    if (draw()) std::fill(c.t_grid.begin(), c.t_grid.end(), 0.0f);
    if (draw()) c.length = 0;
  }
  if (stats) *stats = local;
  return out;
}

std::size_t removal_target(std::size_t nodes, double beta) noexcept {
  if (nodes == 0) return 0;
  const auto m = static_cast<std::size_t>(std::llround(beta * static_cast<double>(nodes)));
  return std::min(m, nodes - 1);
}

namespace {

std::vector<std::uint32_t> alive_indices(const std::vector<bool>& removed) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < removed.size(); ++i) {
    if (!removed[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

features::GraphFeatures drop_structure(const features::GraphFeatures& gf, double beta, Scheme scheme, Rng& rng,
                                       DropRecord* record) {
  const std::size_t v = gf.graph.nodes.size();
  DropRecord local;
  local.target = removal_target(v, beta);
  std::vector<bool> removed(v, false);
  std::size_t count = 0;
  auto remove = [&](std::uint32_t n) {
    if (removed[n] || count + 1 >= v) return;
    removed[n] = true;
    ++count;
    local.removed.push_back(gf.graph.nodes[n]);
  };
  const auto adjacency = gf.graph.adjacency();
  auto remove_random_node = [&] {
    const auto alive = alive_indices(removed);
    remove(alive[rng.index(alive.size())]);
  };

  while (count < local.target) {
    switch (scheme) {
      case Scheme::Node:
        remove_random_node();
        break;
      case Scheme::Node1Hop: {
        const auto alive = alive_indices(removed);
        const std::uint32_t seed = alive[rng.index(alive.size())];
        remove(seed);
        for (std::uint32_t n : adjacency[seed]) remove(n);
        break;
      }
      case Scheme::EdgeVertices: {
        std::vector<std::uint32_t> live_edges;
        for (std::uint32_t j = 0; j < gf.graph.edges.size(); ++j) {
          const brep::GraphEdge& e = gf.graph.edges[j];
          if (!removed[e.a] && !removed[e.b]) live_edges.push_back(j);
        }
        if (live_edges.empty()) {
          remove_random_node();
          break;
        }
        const brep::GraphEdge& e = gf.graph.edges[live_edges[rng.index(live_edges.size())]];
        remove(e.a);
        remove(e.b);
        break;
      }
    }
  }

  features::GraphFeatures out;
  out.grid = gf.grid;
  out.product_layout = gf.product_layout;
  out.graph.part_id = gf.graph.part_id;
  std::vector<std::uint32_t> new_index(v, 0);
  for (std::uint32_t i = 0; i < v; ++i) {
    if (removed[i]) continue;
    new_index[i] = static_cast<std::uint32_t>(out.graph.nodes.size());
    out.graph.nodes.push_back(gf.graph.nodes[i]);
    out.nodes.push_back(gf.nodes[i]);
  }
  for (std::size_t j = 0; j < gf.graph.edges.size(); ++j) {
    const brep::GraphEdge& e = gf.graph.edges[j];
    if (removed[e.a] || removed[e.b]) continue;
    out.graph.edges.push_back({new_index[e.a], new_index[e.b], e.curve_id});
    out.edges.push_back(gf.edges[j]);
  }
  if (record) *record = std::move(local);
  return out;
}

Rng view_rng(std::uint64_t seed, std::string_view part_id, std::uint64_t epoch, std::uint32_t view) {
  return Rng(derive_seed(seed, fnv1a64(part_id), epoch, view));
}

View augment_view(const features::GraphFeatures& gf, const AugmentConfig& cfg, std::uint64_t epoch,
                  std::uint32_t view) {
  Rng rng = view_rng(cfg.seed, gf.graph.part_id, epoch, view);
  View out;
  const features::GraphFeatures dropped = drop_structure(gf, cfg.beta, cfg.scheme, rng, &out.drop);
  out.features = mask_features(dropped, cfg.alpha, rng, &out.mask);
  return out;
}

std::pair<View, View> augment_pair(const features::GraphFeatures& gf, const AugmentConfig& cfg, std::uint64_t epoch) {
  return {augment_view(gf, cfg, epoch, 0), augment_view(gf, cfg, epoch, 1)};
}

nlohmann::json audit_record(const View& view, std::string_view part_id, std::uint64_t epoch, std::uint32_t index) {
  return {{"part", part_id},
          {"epoch", epoch},
          {"view", index},
          {"target", view.drop.target},
          {"removed", view.drop.removed},
          {"groups", view.mask.groups},
          {"masked", view.mask.masked}};
}

AuditLog::AuditLog(const std::string& path) : out_(path, std::ios::app), path_(path) {
  require(out_.good(), ErrorKind::Io, "cannot open audit log '" + path + "'");
}

void AuditLog::write(const nlohmann::json& record) {
  out_ << record.dump() << '\n';
  require(out_.good(), ErrorKind::Io, "write to audit log '" + path_ + "' failed");
}

}  // namespace cadret::augment
