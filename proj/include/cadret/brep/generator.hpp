#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cadret/brep/part.hpp"

namespace cadret::brep {

enum class PartTemplate {
  Box,
  CappedCylinder,
  LBracket,
  Ring,
  SlottedPlate,
  BoxWithHoles,
  SteppedShaft,
  ConeFrustum,
  HexPrism,
  DomedCylinder,
  WavyPlate,
  Torus,
};

std::string_view to_string(PartTemplate t) noexcept;
std::optional<PartTemplate> parse_template(std::string_view name) noexcept;

struct Range {
  double lo = 0;
  double hi = 0;
};

// Product attributes assigned to every face of a generated part. Each
// categorical attribute takes the preferred token with probability
// `preference`, otherwise a uniform draw from the vocabulary.
struct AttrProfile {
  std::string material = "steel";
  std::string finish = "raw";
  double preference = 0.7;
  Range roughness{0.8, 3.2};
};

inline const std::vector<std::string>& material_vocabulary() {
  static const std::vector<std::string> v{"steel", "aluminum", "brass", "plastic"};
  return v;
}

inline const std::vector<std::string>& finish_vocabulary() {
  static const std::vector<std::string> v{"raw", "anodized", "painted", "polished"};
  return v;
}

struct FamilySpec {
  std::string name;
  PartTemplate shape = PartTemplate::Box;
  // Jitter ranges by parameter name; missing names take template defaults.
  std::map<std::string, Range> params;
  AttrProfile attrs;
};

// Parameter names and default ranges for a template.
std::map<std::string, Range> default_params(PartTemplate t);

// Ten families with distinct templates; the reference corpus for training runs.
std::vector<FamilySpec> default_families();

// `count` parts sharing the template topology; deterministic in `seed`.
// Throws Error(Spec) for unknown parameters, inverted ranges, or draws that
// produce invalid geometry.
std::vector<BRepPart> generate_synthetic_family(const FamilySpec& spec, int count, std::uint64_t seed);

// Deterministic single-part construction from explicit parameter values.
BRepPart build_part(PartTemplate t, const std::map<std::string, double>& values, const std::string& id,
                    const std::map<std::string, AttrValue>& attrs = {});

nlohmann::json family_to_json(const FamilySpec& spec);
FamilySpec family_from_json(const nlohmann::json& j);

}  // namespace cadret::brep
