#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cadret/core/rng.hpp"
#include "cadret/features/features.hpp"

namespace cadret::augment {

enum class Scheme : std::uint8_t { Node = 0, Node1Hop = 1, EdgeVertices = 2 };

std::string_view to_string(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

struct AugmentConfig {
  double alpha = 0.1;  // feature mask ratio, [0, 0.2]
  double beta = 0.1;   // structure mask ratio, [0, 0.2]
  Scheme scheme = Scheme::Node;
  std::uint64_t seed = 0;
  bool operator==(const AugmentConfig&) const = default;
};

// Throws Error(Config) when alpha or beta lies outside [0, 0.2].
void validate(const AugmentConfig& cfg);
nlohmann::json config_to_json(const AugmentConfig& cfg);
AugmentConfig config_from_json(const nlohmann::json& j);

struct MaskStats {
  std::size_t groups = 0;
  std::size_t masked = 0;
};

// Each raw-feature group is zero-filled with probability alpha: node uv grid,
// node geo (area), node product, edge uv grid, edge geo (length). Types and
// topology are kept. Groups are drawn node by node, then edge by edge.
features::GraphFeatures mask_features(const features::GraphFeatures& gf, double alpha, Rng& rng,
                                      MaskStats* stats = nullptr);

// m = round(beta |V|), capped at |V| - 1.
std::size_t removal_target(std::size_t nodes, double beta) noexcept;

struct DropRecord {
  std::size_t target = 0;            // m
  std::vector<std::string> removed;  // face ids, in removal order
};

// Deletes nodes (and their incident edges) under `scheme`. Surviving nodes
// and edges keep their relative order. Node removes exactly m nodes;
// Node1Hop and EdgeVertices remove at least m and may overshoot. At least one
// node always survives.
features::GraphFeatures drop_structure(const features::GraphFeatures& gf, double beta, Scheme scheme, Rng& rng,
                                       DropRecord* record = nullptr);

struct View {
  features::GraphFeatures features;
  DropRecord drop;
  MaskStats mask;
};

// Stream for one (part, epoch, view) draw, independent of visiting order.
Rng view_rng(std::uint64_t seed, std::string_view part_id, std::uint64_t epoch, std::uint32_t view);

// mask_features(drop_structure(gf)) drawn from the stream of `view`.
View augment_view(const features::GraphFeatures& gf, const AugmentConfig& cfg, std::uint64_t epoch,
                  std::uint32_t view);
std::pair<View, View> augment_pair(const features::GraphFeatures& gf, const AugmentConfig& cfg,
                                   std::uint64_t epoch = 0);

nlohmann::json audit_record(const View& view, std::string_view part_id, std::uint64_t epoch, std::uint32_t index);

// Appends one JSON object per line.
class AuditLog {
 public:
  explicit AuditLog(const std::string& path);
  void write(const nlohmann::json& record);

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace cadret::augment
