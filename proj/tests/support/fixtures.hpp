#pragma once

// Hand-built parts with known topology and geometry.

#include <cmath>
#include <numbers>
#include <string>

#include "cadret/brep/part.hpp"

namespace cadret::testing {

inline brep::Curve line_curve(const std::string& id, brep::Vec3 a, brep::Vec3 b, std::vector<std::string> faces) {
  return {id, {brep::Line{a, b}, 0, 1}, std::move(faces)};
}

// Axis-aligned box [x0, x0+sx] x [y0, y0+sy] x [z0, z0+sz] with six untrimmed
// planar faces and twelve edges, each shared by two faces.
inline brep::BRepPart box_part(const std::string& id, brep::Vec3 lo, brep::Vec3 size) {
  using brep::Vec3;
  brep::BRepPart p;
  p.id = id;
  const Vec3 hi = lo + size;
  auto plane = [](Vec3 origin, Vec3 normal, Vec3 ref) {
    return brep::SurfaceGeometry{brep::Plane{origin, normal, ref}, false};
  };
  // f0 -z, f1 +z, f2 -y, f3 +y, f4 -x, f5 +x; u along ref, v along normal x ref.
  p.faces.push_back({"f0", plane(lo, {0, 0, -1}, {0, 1, 0}), {0, size.y(), 0, size.x()}, {}, {}});
  p.faces.push_back({"f1", plane({lo.x(), lo.y(), hi.z()}, {0, 0, 1}, {1, 0, 0}), {0, size.x(), 0, size.y()}, {}, {}});
  p.faces.push_back({"f2", plane(lo, {0, -1, 0}, {1, 0, 0}), {0, size.x(), 0, size.z()}, {}, {}});
  p.faces.push_back({"f3", plane({lo.x(), hi.y(), lo.z()}, {0, 1, 0}, {0, 0, 1}), {0, size.z(), 0, size.x()}, {}, {}});
  p.faces.push_back({"f4", plane(lo, {-1, 0, 0}, {0, 0, 1}), {0, size.z(), 0, size.y()}, {}, {}});
  p.faces.push_back({"f5", plane({hi.x(), lo.y(), lo.z()}, {1, 0, 0}, {0, 1, 0}), {0, size.y(), 0, size.z()}, {}, {}});
  const Vec3 c[8] = {{lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()}, {hi.x(), hi.y(), lo.z()},
                     {lo.x(), hi.y(), lo.z()}, {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
                     {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()}};
  p.curves.push_back(line_curve("c00", c[0], c[1], {"f0", "f2"}));
  p.curves.push_back(line_curve("c01", c[1], c[2], {"f0", "f5"}));
  p.curves.push_back(line_curve("c02", c[2], c[3], {"f0", "f3"}));
  p.curves.push_back(line_curve("c03", c[3], c[0], {"f0", "f4"}));
  p.curves.push_back(line_curve("c04", c[4], c[5], {"f1", "f2"}));
  p.curves.push_back(line_curve("c05", c[5], c[6], {"f1", "f5"}));
  p.curves.push_back(line_curve("c06", c[6], c[7], {"f1", "f3"}));
  p.curves.push_back(line_curve("c07", c[7], c[4], {"f1", "f4"}));
  p.curves.push_back(line_curve("c08", c[0], c[4], {"f2", "f4"}));
  p.curves.push_back(line_curve("c09", c[1], c[5], {"f2", "f5"}));
  p.curves.push_back(line_curve("c10", c[2], c[6], {"f3", "f5"}));
  p.curves.push_back(line_curve("c11", c[3], c[7], {"f3", "f4"}));
  return p;
}

// Square planar face [-1,1]^2 at z=0 bounded by four lines, with a centered
// circular hole of radius r.
inline brep::BRepPart holed_plate(double r) {
  using brep::Vec3;
  brep::BRepPart p;
  p.id = "plate";
  brep::Face f{"f0", {brep::Plane{{-1, -1, 0}, {0, 0, 1}, {1, 0, 0}}, false}, {0, 2, 0, 2}, {}, {}};
  f.loops = {{"c0", "c1", "c2", "c3"}, {"h0"}};
  p.faces.push_back(f);
  p.curves.push_back(line_curve("c0", {-1, -1, 0}, {1, -1, 0}, {"f0"}));
  p.curves.push_back(line_curve("c1", {1, -1, 0}, {1, 1, 0}, {"f0"}));
  p.curves.push_back(line_curve("c2", {1, 1, 0}, {-1, 1, 0}, {"f0"}));
  p.curves.push_back(line_curve("c3", {-1, 1, 0}, {-1, -1, 0}, {"f0"}));
  p.curves.push_back({"h0", {brep::Circle{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, r}, 0, 2 * std::numbers::pi}, {"f0"}});
  return p;
}

}  // namespace cadret::testing
