#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "cadret/features/features.hpp"

namespace cadret::features {

inline constexpr std::uint8_t kGraphCacheVersion = 1;

// Binary graph cache: "CRGC", version byte, metadata JSON (provenance: seed,
// config hash), grid dims, product layout, then one
// record per part (part id, |V|, |E|, topology, row-major little-endian f32
// arrays). Every record shares the grid dims and product layout of the header.
std::vector<std::uint8_t> encode_graph_cache(const std::vector<GraphFeatures>& graphs,
                                             const nlohmann::json& meta = nlohmann::json::object());
std::vector<GraphFeatures> decode_graph_cache(std::span<const std::uint8_t> bytes, nlohmann::json* meta = nullptr);

void write_graph_cache(const std::filesystem::path& path, const std::vector<GraphFeatures>& graphs,
                       const nlohmann::json& meta = nlohmann::json::object());
std::vector<GraphFeatures> read_graph_cache(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

}  // namespace cadret::features
