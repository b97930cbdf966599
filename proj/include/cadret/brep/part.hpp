#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cadret/brep/geometry.hpp"

namespace cadret::brep {

struct UvDomain {
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;

  double area() const noexcept { return (u1 - u0) * (v1 - v0); }
  // Maps normalized (s, t) in [0,1]^2 onto the domain.
  Vec2 at(double s, double t) const noexcept { return {u0 + s * (u1 - u0), v0 + t * (v1 - v0)}; }
};

// Product attribute value: categorical token or real number.
using AttrValue = std::variant<std::string, double>;

struct Face {
  std::string id;
  SurfaceGeometry surface;
  UvDomain domain;
  // Each loop is an ordered list of curve ids. A face without loops is
  // bounded by its uv-domain alone.
  std::vector<std::vector<std::string>> loops;
  std::map<std::string, AttrValue> attrs;
};

struct Curve {
  std::string id;
  CurveGeometry geometry;
  std::vector<std::string> adjacent_faces;
};

struct BRepPart {
  std::string id;
  std::vector<Face> faces;
  std::vector<Curve> curves;

  const Face* find_face(std::string_view face_id) const noexcept;
  const Curve* find_curve(std::string_view curve_id) const noexcept;
};

// Checks every structural and geometric invariant; throws Error(Contract)
// naming the offending entity.
void validate(const BRepPart& part);

// Evaluates a face at normalized coordinates (s, t) in [0,1]^2 of its domain.
SurfacePoint evaluate_face(const Face& face, double s, double t);

struct BoundingBox {
  Vec3 lo, hi;

  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
};

// Box over a fixed sampling of every face domain (17x17) and curve (33 points).
BoundingBox bounding_box(const BRepPart& part);

// Centers the bounding box at the origin and maps its longest side to [-1, 1].
// Throws Error(Degenerate) for a zero-extent box.
BRepPart normalize_part(const BRepPart& part);

// Applies a similarity map to all geometry, rescaling length-valued domains.
BRepPart transform_part(const BRepPart& part, const SimilarityMap& map);

}  // namespace cadret::brep
