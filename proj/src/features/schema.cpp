#include "cadret/features/schema.hpp"

#include "cadret/brep/generator.hpp"
#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"

namespace cadret::features {

std::optional<std::uint32_t> AttrSchema::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

std::uint32_t AttrSchema::token(std::uint32_t attr, std::string_view value) const noexcept {
  const auto& vocab = attrs[attr].vocabulary;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab[i] == value) return static_cast<std::uint32_t>(i + 1);
  }
  return kUnknownToken;
}

std::uint32_t AttrSchema::dense_width() const noexcept {
  std::uint32_t w = 0;
  for (const AttrDef& a : attrs) w += a.width();
  return w;
}

AttrSchema default_schema() {
  AttrSchema s;
  s.attrs.push_back({"material", AttrType::Categorical, brep::material_vocabulary(), 0, 1});
  s.attrs.push_back({"finish", AttrType::Categorical, brep::finish_vocabulary(), 0, 1});
  // Uniform on [0.8, 3.2]: mean 2.0, std 2.4/sqrt(12).
  s.attrs.push_back({"roughness", AttrType::Real, {}, 2.0, 0.6928203230275509});
  return s;
}

nlohmann::json schema_to_json(const AttrSchema& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const AttrDef& a : schema.attrs) {
    if (a.type == AttrType::Categorical) {
      attrs.push_back({{"name", a.name}, {"type", "categorical"}, {"vocab", a.vocabulary}});
    } else {
      attrs.push_back({{"name", a.name}, {"type", "real"}, {"mean", a.mean}, {"std", a.stddev}});
    }
  }
  return {{"attributes", attrs}};
}

AttrSchema schema_from_json(const nlohmann::json& j) {
  try {
    AttrSchema s;
    for (const auto& aj : j.at("attributes")) {
      AttrDef a;
      a.name = aj.at("name").get<std::string>();
      const std::string type = aj.at("type").get<std::string>();
      if (type == "categorical") {
        a.type = AttrType::Categorical;
        a.vocabulary = aj.at("vocab").get<std::vector<std::string>>();
      } else if (type == "real") {
        a.type = AttrType::Real;
        a.mean = aj.at("mean").get<double>();
        a.stddev = aj.at("std").get<double>();
        require(a.stddev > 0, ErrorKind::Schema, "attribute '" + a.name + "': std must be positive");
      } else {
        fail(ErrorKind::Schema, "attribute '" + a.name + "': unknown type '" + type + "'");
      }
      require(!s.find(a.name), ErrorKind::Schema, "duplicate attribute '" + a.name + "'");
      s.attrs.push_back(std::move(a));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("attribute schema: ") + e.what());
  }
}

AttrSchema read_schema(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Format, path.string() + ": invalid JSON");
  return schema_from_json(j);
}

void write_schema(const std::filesystem::path& path, const AttrSchema& schema) {
  write_file_atomic(path, schema_to_json(schema).dump(2) + "\n");
}

}  // namespace cadret::features
