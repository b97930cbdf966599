#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace cadret::brep {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Surface kinds in categorical-index order (the order is part of the cache format).
enum class SurfaceKind : int { Plane = 0, Cylinder, Cone, Sphere, Torus, Freeform };
inline constexpr int kSurfaceKindCount = 6;

enum class CurveKind : int { Line = 0, Circle, Freeform };
inline constexpr int kCurveKindCount = 3;

std::string_view to_string(SurfaceKind kind) noexcept;
std::string_view to_string(CurveKind kind) noexcept;
std::optional<SurfaceKind> parse_surface_kind(std::string_view name) noexcept;
std::optional<CurveKind> parse_curve_kind(std::string_view name) noexcept;

// Analytic surfaces share a local frame: `axis` (or plane normal) and `ref`
// are orthonormal; the third direction is axis x ref.

// P(u, v) = origin + u*ref + v*(normal x ref)
struct Plane {
  Vec3 origin{0, 0, 0};
  Vec3 normal{0, 0, 1};
  Vec3 ref{1, 0, 0};
};

// P(u, v) = origin + radius*rho(u) + v*axis,  rho(u) = cos u ref + sin u (axis x ref)
struct Cylinder {
  Vec3 origin{0, 0, 0};
  Vec3 axis{0, 0, 1};
  Vec3 ref{1, 0, 0};
  double radius = 1;
};

// P(u, v) = origin + (radius + v tan(semi_angle))*rho(u) + v*axis
struct Cone {
  Vec3 origin{0, 0, 0};
  Vec3 axis{0, 0, 1};
  Vec3 ref{1, 0, 0};
  double radius = 1;
  double semi_angle = 0.25;
};

// P(u, v) = center + radius*(cos v rho(u) + sin v axis), v latitude
struct Sphere {
  Vec3 center{0, 0, 0};
  Vec3 axis{0, 0, 1};
  Vec3 ref{1, 0, 0};
  double radius = 1;
};

// P(u, v) = center + (major + minor cos v) rho(u) + minor sin v axis
struct Torus {
  Vec3 center{0, 0, 0};
  Vec3 axis{0, 0, 1};
  Vec3 ref{1, 0, 0};
  double major_radius = 2;
  double minor_radius = 0.5;
};

// Tensor-product Bezier patch over [0,1]^2; control grid is row-major,
// rows along v, columns along u. 2x2 is bilinear, 4x4 bicubic.
struct BezierSurface {
  int rows = 0;
  int cols = 0;
  std::vector<Vec3> control;
};

using SurfaceShape = std::variant<Plane, Cylinder, Cone, Sphere, Torus, BezierSurface>;

struct SurfaceGeometry {
  SurfaceShape shape;
  bool reversed = false;  // flips the evaluated normal

  SurfaceKind kind() const noexcept { return static_cast<SurfaceKind>(shape.index()); }
};

struct SurfacePoint {
  Vec3 point;
  Vec3 normal;
};

// P(t) = start + t*(end - start)
struct Line {
  Vec3 start{0, 0, 0};
  Vec3 end{1, 0, 0};
};

// P(t) = center + radius*(cos t ref + sin t (axis x ref))
struct Circle {
  Vec3 center{0, 0, 0};
  Vec3 axis{0, 0, 1};
  Vec3 ref{1, 0, 0};
  double radius = 1;
};

// Bezier curve over t in [0,1].
struct BezierCurve {
  std::vector<Vec3> control;
};

using CurveShape = std::variant<Line, Circle, BezierCurve>;

struct CurveGeometry {
  CurveShape shape;
  double t0 = 0;
  double t1 = 1;

  CurveKind kind() const noexcept { return static_cast<CurveKind>(shape.index()); }
};

struct CurvePoint {
  Vec3 point;
  Vec3 tangent;
};

// Throws Error(Contract) when unit vectors, radii or control grids are invalid.
void validate(const SurfaceGeometry& surface);
void validate(const CurveGeometry& curve);

// Raw parameter evaluation. Only freeform patches have a bounded parameter
// domain; evaluating outside [0,1]^2 throws Error(Domain).
SurfacePoint evaluate_surface(const SurfaceGeometry& surface, double u, double v);

// Throws Error(Domain) for t outside [t0, t1].
CurvePoint evaluate_curve(const CurveGeometry& curve, double t);

// Inverse map of a point on (or near) the surface to (u, v). Angular
// parameters are returned in [0, 2pi) unless `near` is given, in which case
// the periodic parameter is unwrapped to the representative closest to it.
Vec2 project_to_uv(const SurfaceGeometry& surface, const Vec3& p,
                   const std::optional<Vec2>& near = std::nullopt);

bool is_u_periodic(const SurfaceGeometry& surface) noexcept;

// Arc length over [t0, t1]: closed form for lines and circles, 16-point
// composite Gauss-Legendre for Bezier curves.
double curve_length(const CurveGeometry& curve);

// |dP/du x dP/dv| at (u, v).
double surface_jacobian(const SurfaceGeometry& surface, double u, double v);

// p' = scale * (p - center), applied to every positional quantity.
struct SimilarityMap {
  Vec3 center{0, 0, 0};
  double scale = 1;

  Vec3 point(const Vec3& p) const { return scale * (p - center); }
};

// Transformed surface. Parameters measured in model length (plane u/v,
// cylinder/cone axial v) scale by `scale`; the caller rescales the face
// domain via `scales_u` / `scales_v`.
SurfaceGeometry transform(const SurfaceGeometry& surface, const SimilarityMap& map);
CurveGeometry transform(const CurveGeometry& curve, const SimilarityMap& map);
bool scales_u(const SurfaceGeometry& surface) noexcept;
bool scales_v(const SurfaceGeometry& surface) noexcept;

}  // namespace cadret::brep
