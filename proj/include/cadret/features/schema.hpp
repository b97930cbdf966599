#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cadret::features {

enum class AttrType : std::uint8_t { Categorical = 0, Real = 1 };

// One product attribute. Categorical tokens index into `vocabulary` offset by
// one: index 0 is the reserved UNK token.
struct AttrDef {
  std::string name;
  AttrType type = AttrType::Categorical;
  std::vector<std::string> vocabulary;
  double mean = 0;
  double stddev = 1;

  // Width of the dense encoding: vocabulary + UNK for categorical, 1 for real.
  std::uint32_t width() const noexcept {
    return type == AttrType::Categorical ? static_cast<std::uint32_t>(vocabulary.size() + 1) : 1u;
  }
};

inline constexpr std::uint32_t kUnknownToken = 0;

// Dataset-level product attribute schema. Attribute id = position in `attrs`.
struct AttrSchema {
  std::vector<AttrDef> attrs;

  std::optional<std::uint32_t> find(std::string_view name) const noexcept;
  std::uint32_t token(std::uint32_t attr, std::string_view value) const noexcept;
  std::uint32_t dense_width() const noexcept;
};

// Schema matching the synthetic generator's attributes.
AttrSchema default_schema();

nlohmann::json schema_to_json(const AttrSchema& schema);
AttrSchema schema_from_json(const nlohmann::json& j);
AttrSchema read_schema(const std::filesystem::path& path);
void write_schema(const std::filesystem::path& path, const AttrSchema& schema);

}  // namespace cadret::features
