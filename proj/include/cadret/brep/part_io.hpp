#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cadret/brep/part.hpp"

namespace cadret::brep {

// Part file format: one JSON object per line. See docs/formats.md.
nlohmann::ordered_json part_to_json(const BRepPart& part);
// Throws Error(Format) on missing/mistyped fields, Error(Contract) when the
// decoded part violates its invariants.
BRepPart part_from_json(const nlohmann::json& j);

std::string to_jsonl_line(const BRepPart& part);

// Parse errors are reported as Error(Format) with the 1-based line number.
std::vector<BRepPart> read_parts_jsonl(const std::filesystem::path& path);
std::vector<BRepPart> parse_parts_jsonl(const std::string& text);
void write_parts_jsonl(const std::filesystem::path& path, const std::vector<BRepPart>& parts);

}  // namespace cadret::brep
