#include "cadret/brep/part_io.hpp"

#include <sstream>

#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"

namespace cadret::brep {
namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ojson vec(const Vec3& v) { return ojson::array({v.x(), v.y(), v.z()}); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Format, std::string("missing field '") + key + "'");
  return j.at(key);
}

double num(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) fail(ErrorKind::Format, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Vec3 vec(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array() || v.size() != 3) {
    fail(ErrorKind::Format, std::string("field '") + key + "' must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<Vec3> points(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) fail(ErrorKind::Format, std::string("field '") + key + "' must be an array");
  std::vector<Vec3> out;
  for (const json& p : v) {
    if (!p.is_array() || p.size() != 3) fail(ErrorKind::Format, "control point must have 3 coordinates");
    out.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return out;
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) fail(ErrorKind::Format, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strings(const json& v, const char* what) {
  if (!v.is_array()) fail(ErrorKind::Format, std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const json& s : v) {
    if (!s.is_string()) fail(ErrorKind::Format, std::string(what) + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

ojson surface_json(const SurfaceGeometry& s) {
  ojson params = std::visit(
      Overloaded{
          [](const Plane& p) {
            return ojson{{"origin", vec(p.origin)}, {"normal", vec(p.normal)}, {"ref", vec(p.ref)}};
          },
          [](const Cylinder& p) {
            return ojson{{"origin", vec(p.origin)}, {"axis", vec(p.axis)}, {"ref", vec(p.ref)},
                         {"radius", p.radius}};
          },
          [](const Cone& p) {
            return ojson{{"origin", vec(p.origin)}, {"axis", vec(p.axis)}, {"ref", vec(p.ref)},
                         {"radius", p.radius},      {"semi_angle", p.semi_angle}};
          },
          [](const Sphere& p) {
            return ojson{{"center", vec(p.center)}, {"axis", vec(p.axis)}, {"ref", vec(p.ref)},
                         {"radius", p.radius}};
          },
          [](const Torus& p) {
            return ojson{{"center", vec(p.center)},
                         {"axis", vec(p.axis)},
                         {"ref", vec(p.ref)},
                         {"major_radius", p.major_radius},
                         {"minor_radius", p.minor_radius}};
          },
          [](const BezierSurface& p) {
            ojson ctrl = ojson::array();
            for (const Vec3& q : p.control) ctrl.push_back(vec(q));
            return ojson{{"rows", p.rows}, {"cols", p.cols}, {"control", ctrl}};
          },
      },
      s.shape);
  ojson out{{"kind", std::string(to_string(s.kind()))}, {"params", params}};
  if (s.reversed) out["reversed"] = true;
  return out;
}

SurfaceGeometry surface_from(const json& j) {
  const std::string kind_name = str(j, "kind");
  auto kind = parse_surface_kind(kind_name);
  if (!kind) fail(ErrorKind::Format, "unknown surface kind '" + kind_name + "'");
  const json& p = field(j, "params");
  SurfaceGeometry s;
  switch (*kind) {
    case SurfaceKind::Plane: s.shape = Plane{vec(p, "origin"), vec(p, "normal"), vec(p, "ref")}; break;
    case SurfaceKind::Cylinder:
      s.shape = Cylinder{vec(p, "origin"), vec(p, "axis"), vec(p, "ref"), num(p, "radius")};
      break;
    case SurfaceKind::Cone:
      s.shape = Cone{vec(p, "origin"), vec(p, "axis"), vec(p, "ref"), num(p, "radius"),
                     num(p, "semi_angle")};
      break;
    case SurfaceKind::Sphere:
      s.shape = Sphere{vec(p, "center"), vec(p, "axis"), vec(p, "ref"), num(p, "radius")};
      break;
    case SurfaceKind::Torus:
      s.shape = Torus{vec(p, "center"), vec(p, "axis"), vec(p, "ref"), num(p, "major_radius"),
                      num(p, "minor_radius")};
      break;
    case SurfaceKind::Freeform:
      s.shape = BezierSurface{static_cast<int>(num(p, "rows")), static_cast<int>(num(p, "cols")),
                              points(p, "control")};
      break;
  }
  if (j.contains("reversed")) s.reversed = j.at("reversed").get<bool>();
  return s;
}

ojson curve_json(const CurveGeometry& c) {
  ojson params = std::visit(
      Overloaded{
          [](const Line& l) { return ojson{{"start", vec(l.start)}, {"end", vec(l.end)}}; },
          [](const Circle& k) {
            return ojson{{"center", vec(k.center)}, {"axis", vec(k.axis)}, {"ref", vec(k.ref)},
                         {"radius", k.radius}};
          },
          [](const BezierCurve& b) {
            ojson ctrl = ojson::array();
            for (const Vec3& q : b.control) ctrl.push_back(vec(q));
            return ojson{{"control", ctrl}};
          },
      },
      c.shape);
  return ojson{{"kind", std::string(to_string(c.kind()))},
               {"params", params},
               {"interval", ojson::array({c.t0, c.t1})}};
}

CurveGeometry curve_from(const json& j) {
  const std::string kind_name = str(j, "kind");
  auto kind = parse_curve_kind(kind_name);
  if (!kind) fail(ErrorKind::Format, "unknown curve kind '" + kind_name + "'");
  const json& p = field(j, "params");
  CurveGeometry c;
  switch (*kind) {
    case CurveKind::Line: c.shape = Line{vec(p, "start"), vec(p, "end")}; break;
    case CurveKind::Circle:
      c.shape = Circle{vec(p, "center"), vec(p, "axis"), vec(p, "ref"), num(p, "radius")};
      break;
    case CurveKind::Freeform: c.shape = BezierCurve{points(p, "control")}; break;
  }
  const json& interval = field(j, "interval");
  if (!interval.is_array() || interval.size() != 2) fail(ErrorKind::Format, "interval must be [t0, t1]");
  c.t0 = interval[0].get<double>();
  c.t1 = interval[1].get<double>();
  return c;
}

}  // namespace

nlohmann::ordered_json part_to_json(const BRepPart& part) {
  ojson faces = ojson::array();
  for (const Face& f : part.faces) {
    ojson attrs = ojson::object();
    for (const auto& [name, value] : f.attrs) {
      std::visit([&](const auto& v) { attrs[name] = v; }, value);
    }
    ojson loops = ojson::array();
    for (const auto& loop : f.loops) loops.push_back(loop);
    faces.push_back(ojson{{"id", f.id},
                          {"surface", surface_json(f.surface)},
                          {"uv_domain", ojson::array({f.domain.u0, f.domain.u1, f.domain.v0, f.domain.v1})},
                          {"loops", loops},
                          {"attrs", attrs}});
  }
  ojson curves = ojson::array();
  for (const Curve& c : part.curves) {
    curves.push_back(ojson{{"id", c.id}, {"geometry", curve_json(c.geometry)}, {"adjacent_faces", c.adjacent_faces}});
  }
  return ojson{{"id", part.id}, {"faces", faces}, {"curves", curves}};
}

BRepPart part_from_json(const nlohmann::json& j) {
  try {
    BRepPart part;
    part.id = str(j, "id");
    for (const json& fj : field(j, "faces")) {
      Face f;
      f.id = str(fj, "id");
      f.surface = surface_from(field(fj, "surface"));
      const json& d = field(fj, "uv_domain");
      if (!d.is_array() || d.size() != 4) fail(ErrorKind::Format, "uv_domain must be [u0, u1, v0, v1]");
      f.domain = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()};
      if (fj.contains("loops")) {
        for (const json& loop : fj.at("loops")) f.loops.push_back(strings(loop, "loop"));
      }
      if (fj.contains("attrs")) {
        for (const auto& [name, value] : fj.at("attrs").items()) {
          if (value.is_string()) {
            f.attrs[name] = value.get<std::string>();
          } else if (value.is_number()) {
            f.attrs[name] = value.get<double>();
          } else {
            fail(ErrorKind::Format, "attribute '" + name + "' must be a string or a number");
          }
        }
      }
      part.faces.push_back(std::move(f));
    }
    for (const json& cj : field(j, "curves")) {
      Curve c;
      c.id = str(cj, "id");
      c.geometry = curve_from(field(cj, "geometry"));
      c.adjacent_faces = strings(field(cj, "adjacent_faces"), "adjacent_faces");
      part.curves.push_back(std::move(c));
    }
    validate(part);
    return part;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, e.what());
  }
}

std::string to_jsonl_line(const BRepPart& part) { return part_to_json(part).dump(); }

std::vector<BRepPart> parse_parts_jsonl(const std::string& text) {
  std::vector<BRepPart> parts;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      parts.push_back(part_from_json(json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Format, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return parts;
}

std::vector<BRepPart> read_parts_jsonl(const std::filesystem::path& path) {
  return parse_parts_jsonl(read_file_text(path));
}

void write_parts_jsonl(const std::filesystem::path& path, const std::vector<BRepPart>& parts) {
  std::string text;
  for (const BRepPart& p : parts) {
    text += to_jsonl_line(p);
    text += '\n';
  }
  write_file_atomic(path, text);
}

}  // namespace cadret::brep
