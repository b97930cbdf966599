#include "cadret/brep/geometry.hpp"

#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "cadret/core/error.hpp"

namespace cadret::brep {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kUnitTol = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec3 radial(const Vec3& axis, const Vec3& ref, double u) {
  return std::cos(u) * ref + std::sin(u) * axis.cross(ref);
}

Vec3 tangential(const Vec3& axis, const Vec3& ref, double u) {
  return -std::sin(u) * ref + std::cos(u) * axis.cross(ref);
}

double angle_of(const Vec3& d, const Vec3& axis, const Vec3& ref) {
  double a = std::atan2(d.dot(axis.cross(ref)), d.dot(ref));
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

void require_frame(const Vec3& axis, const Vec3& ref, std::string_view what) {
  require(std::abs(axis.norm() - 1.0) <= kUnitTol, ErrorKind::Contract,
          std::string(what) + ": axis/normal must have unit norm");
  require(std::abs(ref.norm() - 1.0) <= kUnitTol, ErrorKind::Contract,
          std::string(what) + ": reference direction must have unit norm");
  require(std::abs(axis.dot(ref)) <= kUnitTol, ErrorKind::Contract,
          std::string(what) + ": reference direction must be orthogonal to the axis");
}

void require_positive(double r, std::string_view what) {
  require(std::isfinite(r) && r > 0, ErrorKind::Contract, std::string(what) + " must be positive");
}

// Bernstein basis values and first derivatives for degree n at t.
void bernstein(int n, double t, std::vector<double>& b, std::vector<double>& db) {
  b.assign(static_cast<std::size_t>(n) + 1, 0.0);
  db.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (n == 0) {
    b[0] = 1;
    return;
  }
  // Degree n-1 basis for the derivative, then elevate once more.
  std::vector<double> lower(static_cast<std::size_t>(n), 0.0);
  lower[0] = 1;
  for (int d = 1; d < n; ++d) {
    for (int i = d; i >= 0; --i) {
      double left = i > 0 ? lower[i - 1] * t : 0.0;
      double right = i < d ? lower[i] * (1 - t) : 0.0;
      lower[i] = left + right;
    }
  }
  for (int i = 0; i <= n; ++i) {
    double left = i > 0 ? lower[i - 1] * t : 0.0;
    double right = i < n ? lower[i] * (1 - t) : 0.0;
    b[i] = left + right;
    double dl = i > 0 ? lower[i - 1] : 0.0;
    double dr = i < n ? lower[i] : 0.0;
    db[i] = n * (dl - dr);
  }
}

struct PatchEval {
  Vec3 p, du, dv;
};

PatchEval eval_patch(const BezierSurface& s, double u, double v) {
  std::vector<double> bu, dbu, bv, dbv;
  bernstein(s.cols - 1, u, bu, dbu);
  bernstein(s.rows - 1, v, bv, dbv);
  PatchEval out{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const Vec3& q = s.control[static_cast<std::size_t>(r * s.cols + c)];
      out.p += bv[r] * bu[c] * q;
      out.du += bv[r] * dbu[c] * q;
      out.dv += dbv[r] * bu[c] * q;
    }
  }
  return out;
}

void require_unit_square(double u, double v) {
  constexpr double eps = 1e-12;
  if (!(u >= -eps && u <= 1 + eps && v >= -eps && v <= 1 + eps)) {
    fail(ErrorKind::Domain, "freeform surface evaluated outside its control domain at (" +
                                std::to_string(u) + ", " + std::to_string(v) + ")");
  }
}

double unwrap(double value, double near) {
  return value + kTwoPi * std::round((near - value) / kTwoPi);
}

}  // namespace

std::string_view to_string(SurfaceKind kind) noexcept {
  switch (kind) {
    case SurfaceKind::Plane: return "plane";
    case SurfaceKind::Cylinder: return "cylinder";
    case SurfaceKind::Cone: return "cone";
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::Freeform: return "freeform";
  }
  return "unknown";
}

std::string_view to_string(CurveKind kind) noexcept {
  switch (kind) {
    case CurveKind::Line: return "line";
    case CurveKind::Circle: return "circle";
    case CurveKind::Freeform: return "freeform";
  }
  return "unknown";
}

std::optional<SurfaceKind> parse_surface_kind(std::string_view name) noexcept {
  for (int i = 0; i < kSurfaceKindCount; ++i) {
    if (to_string(static_cast<SurfaceKind>(i)) == name) return static_cast<SurfaceKind>(i);
  }
  return std::nullopt;
}

std::optional<CurveKind> parse_curve_kind(std::string_view name) noexcept {
  for (int i = 0; i < kCurveKindCount; ++i) {
    if (to_string(static_cast<CurveKind>(i)) == name) return static_cast<CurveKind>(i);
  }
  return std::nullopt;
}

void validate(const SurfaceGeometry& surface) {
  std::visit(Overloaded{
                 [](const Plane& s) { require_frame(s.normal, s.ref, "plane"); },
                 [](const Cylinder& s) {
                   require_frame(s.axis, s.ref, "cylinder");
                   require_positive(s.radius, "cylinder radius");
                 },
                 [](const Cone& s) {
                   require_frame(s.axis, s.ref, "cone");
                   require_positive(s.radius, "cone radius");
                   require(std::abs(s.semi_angle) < std::numbers::pi / 2, ErrorKind::Contract,
                           "cone semi-angle must be within (-pi/2, pi/2)");
                 },
                 [](const Sphere& s) {
                   require_frame(s.axis, s.ref, "sphere");
                   require_positive(s.radius, "sphere radius");
                 },
                 [](const Torus& s) {
                   require_frame(s.axis, s.ref, "torus");
                   require_positive(s.major_radius, "torus major radius");
                   require_positive(s.minor_radius, "torus minor radius");
                 },
                 [](const BezierSurface& s) {
                   require(s.rows >= 1 && s.cols >= 1 &&
                               s.control.size() == static_cast<std::size_t>(s.rows * s.cols),
                           ErrorKind::Contract,
                           "freeform control grid must be rectangular and non-empty");
                 },
             },
             surface.shape);
}

void validate(const CurveGeometry& curve) {
  require(curve.t0 < curve.t1, ErrorKind::Contract, "curve interval requires t0 < t1");
  std::visit(Overloaded{
                 [](const Line& c) {
                   require((c.end - c.start).norm() > 0, ErrorKind::Contract,
                           "line start and end coincide");
                 },
                 [](const Circle& c) {
                   require_frame(c.axis, c.ref, "circle");
                   require_positive(c.radius, "circle radius");
                 },
                 [](const BezierCurve& c) {
                   require(c.control.size() >= 2, ErrorKind::Contract,
                           "freeform curve needs at least two control points");
                 },
             },
             curve.shape);
}

SurfacePoint evaluate_surface(const SurfaceGeometry& surface, double u, double v) {
  SurfacePoint out = std::visit(
      Overloaded{
          [&](const Plane& s) {
            return SurfacePoint{s.origin + u * s.ref + v * s.normal.cross(s.ref), s.normal};
          },
          [&](const Cylinder& s) {
            Vec3 rho = radial(s.axis, s.ref, u);
            return SurfacePoint{s.origin + s.radius * rho + v * s.axis, rho};
          },
          [&](const Cone& s) {
            Vec3 rho = radial(s.axis, s.ref, u);
            double r = s.radius + v * std::tan(s.semi_angle);
            if (!(r > 0)) fail(ErrorKind::Domain, "cone evaluated at or beyond its apex");
            Vec3 n = std::cos(s.semi_angle) * rho - std::sin(s.semi_angle) * s.axis;
            return SurfacePoint{s.origin + r * rho + v * s.axis, n};
          },
          [&](const Sphere& s) {
            Vec3 n = std::cos(v) * radial(s.axis, s.ref, u) + std::sin(v) * s.axis;
            return SurfacePoint{s.center + s.radius * n, n};
          },
          [&](const Torus& s) {
            Vec3 rho = radial(s.axis, s.ref, u);
            Vec3 n = std::cos(v) * rho + std::sin(v) * s.axis;
            return SurfacePoint{s.center + s.major_radius * rho + s.minor_radius * n, n};
          },
          [&](const BezierSurface& s) {
            require_unit_square(u, v);
            PatchEval e = eval_patch(s, u, v);
            Vec3 n = e.du.cross(e.dv);
            double len = n.norm();
            if (!(len > 1e-14)) fail(ErrorKind::Domain, "freeform surface normal is degenerate");
            return SurfacePoint{e.p, n / len};
          },
      },
      surface.shape);
  out.normal.normalize();
  if (surface.reversed) out.normal = -out.normal;
  return out;
}

CurvePoint evaluate_curve(const CurveGeometry& curve, double t) {
  const double span = curve.t1 - curve.t0;
  const double eps = 1e-12 * std::max(1.0, std::abs(span));
  if (!(t >= curve.t0 - eps && t <= curve.t1 + eps)) {
    fail(ErrorKind::Domain, "curve parameter " + std::to_string(t) + " outside [" +
                                std::to_string(curve.t0) + ", " + std::to_string(curve.t1) + "]");
  }
  CurvePoint out = std::visit(
      Overloaded{
          [&](const Line& c) {
            Vec3 d = c.end - c.start;
            return CurvePoint{c.start + t * d, d};
          },
          [&](const Circle& c) {
            return CurvePoint{c.center + c.radius * radial(c.axis, c.ref, t),
                              tangential(c.axis, c.ref, t)};
          },
          [&](const BezierCurve& c) {
            const int n = static_cast<int>(c.control.size()) - 1;
            std::vector<double> b, db;
            bernstein(n, t, b, db);
            Vec3 p = Vec3::Zero(), d = Vec3::Zero();
            for (int i = 0; i <= n; ++i) {
              p += b[i] * c.control[i];
              d += db[i] * c.control[i];
            }
            if (!(d.norm() > 1e-14)) fail(ErrorKind::Domain, "freeform curve tangent is degenerate");
            return CurvePoint{p, d};
          },
      },
      curve.shape);
  out.tangent.normalize();
  return out;
}

bool is_u_periodic(const SurfaceGeometry& surface) noexcept {
  const SurfaceKind k = surface.kind();
  return k != SurfaceKind::Plane && k != SurfaceKind::Freeform;
}

Vec2 project_to_uv(const SurfaceGeometry& surface, const Vec3& p, const std::optional<Vec2>& near) {
  Vec2 uv = std::visit(
      Overloaded{
          [&](const Plane& s) {
            Vec3 d = p - s.origin;
            return Vec2(d.dot(s.ref), d.dot(s.normal.cross(s.ref)));
          },
          [&](const Cylinder& s) {
            Vec3 d = p - s.origin;
            return Vec2(angle_of(d, s.axis, s.ref), d.dot(s.axis));
          },
          [&](const Cone& s) {
            Vec3 d = p - s.origin;
            return Vec2(angle_of(d, s.axis, s.ref), d.dot(s.axis));
          },
          [&](const Sphere& s) {
            Vec3 d = p - s.center;
            double len = d.norm();
            double z = len > 0 ? std::clamp(d.dot(s.axis) / len, -1.0, 1.0) : 0.0;
            return Vec2(angle_of(d, s.axis, s.ref), std::asin(z));
          },
          [&](const Torus& s) {
            Vec3 d = p - s.center;
            double u = angle_of(d, s.axis, s.ref);
            Vec3 rho = radial(s.axis, s.ref, u);
            Vec3 w = d - s.major_radius * rho;
            double v = std::atan2(w.dot(s.axis), w.dot(rho));
            if (v < 0) v += kTwoPi;
            return Vec2(u, v);
          },
          [&](const BezierSurface& s) {
            // Coarse seed, then Gauss-Newton on |S(u,v) - p|^2 clamped to the unit square.
            Vec2 best(0.5, 0.5);
            double best_d = std::numeric_limits<double>::infinity();
            constexpr int kSeed = 9;
            for (int i = 0; i < kSeed; ++i) {
              for (int j = 0; j < kSeed; ++j) {
                double u = i / double(kSeed - 1), v = j / double(kSeed - 1);
                double d = (eval_patch(s, u, v).p - p).squaredNorm();
                if (d < best_d) {
                  best_d = d;
                  best = Vec2(u, v);
                }
              }
            }
            for (int iter = 0; iter < 30; ++iter) {
              PatchEval e = eval_patch(s, best.x(), best.y());
              Vec3 r = e.p - p;
              Eigen::Matrix2d jtj;
              jtj << e.du.dot(e.du), e.du.dot(e.dv), e.du.dot(e.dv), e.dv.dot(e.dv);
              Vec2 g(e.du.dot(r), e.dv.dot(r));
              if (std::abs(jtj.determinant()) < 1e-300) break;
              Vec2 step = jtj.ldlt().solve(g);
              best = (best - step).cwiseMax(0.0).cwiseMin(1.0);
              if (step.norm() < 1e-14) break;
            }
            return best;
          },
      },
      surface.shape);
  if (near) {
    if (is_u_periodic(surface)) uv.x() = unwrap(uv.x(), near->x());
    if (surface.kind() == SurfaceKind::Torus) uv.y() = unwrap(uv.y(), near->y());
  }
  return uv;
}

double curve_length(const CurveGeometry& curve) {
  return std::visit(
      Overloaded{
          [&](const Line& c) { return (c.end - c.start).norm() * (curve.t1 - curve.t0); },
          [&](const Circle& c) { return c.radius * (curve.t1 - curve.t0); },
          [&](const BezierCurve& c) {
            static constexpr std::array<double, 8> x = {
                0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
                0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
            static constexpr std::array<double, 8> w = {
                0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
            const int n = static_cast<int>(c.control.size()) - 1;
            std::vector<double> b, db;
            auto speed = [&](double t) {
              bernstein(n, t, b, db);
              Vec3 d = Vec3::Zero();
              for (int i = 0; i <= n; ++i) d += db[i] * c.control[i];
              return d.norm();
            };
            constexpr int kPanels = 8;
            const double h = (curve.t1 - curve.t0) / kPanels;
            double total = 0;
            for (int p = 0; p < kPanels; ++p) {
              double mid = curve.t0 + (p + 0.5) * h;
              for (std::size_t i = 0; i < x.size(); ++i) {
                total += w[i] * 0.5 * h * (speed(mid - 0.5 * h * x[i]) + speed(mid + 0.5 * h * x[i]));
              }
            }
            return total;
          },
      },
      curve.shape);
}

double surface_jacobian(const SurfaceGeometry& surface, double u, double v) {
  return std::visit(
      Overloaded{
          [](const Plane&) { return 1.0; },
          [](const Cylinder& s) { return s.radius; },
          [&](const Cone& s) {
            double r = s.radius + v * std::tan(s.semi_angle);
            return std::abs(r) / std::cos(s.semi_angle);
          },
          [&](const Sphere& s) { return s.radius * s.radius * std::abs(std::cos(v)); },
          [&](const Torus& s) {
            return s.minor_radius * std::abs(s.major_radius + s.minor_radius * std::cos(v));
          },
          [&](const BezierSurface& s) {
            require_unit_square(u, v);
            PatchEval e = eval_patch(s, u, v);
            return e.du.cross(e.dv).norm();
          },
      },
      surface.shape);
}

SurfaceGeometry transform(const SurfaceGeometry& surface, const SimilarityMap& map) {
  SurfaceGeometry out = surface;
  std::visit(Overloaded{
                 [&](Plane& s) { s.origin = map.point(s.origin); },
                 [&](Cylinder& s) {
                   s.origin = map.point(s.origin);
                   s.radius *= map.scale;
                 },
                 [&](Cone& s) {
                   s.origin = map.point(s.origin);
                   s.radius *= map.scale;
                 },
                 [&](Sphere& s) {
                   s.center = map.point(s.center);
                   s.radius *= map.scale;
                 },
                 [&](Torus& s) {
                   s.center = map.point(s.center);
                   s.major_radius *= map.scale;
                   s.minor_radius *= map.scale;
                 },
                 [&](BezierSurface& s) {
                   for (Vec3& q : s.control) q = map.point(q);
                 },
             },
             out.shape);
  return out;
}

CurveGeometry transform(const CurveGeometry& curve, const SimilarityMap& map) {
  CurveGeometry out = curve;
  std::visit(Overloaded{
                 [&](Line& c) {
                   c.start = map.point(c.start);
                   c.end = map.point(c.end);
                 },
                 [&](Circle& c) {
                   c.center = map.point(c.center);
                   c.radius *= map.scale;
                 },
                 [&](BezierCurve& c) {
                   for (Vec3& q : c.control) q = map.point(q);
                 },
             },
             out.shape);
  return out;
}

bool scales_u(const SurfaceGeometry& surface) noexcept { return surface.kind() == SurfaceKind::Plane; }

bool scales_v(const SurfaceGeometry& surface) noexcept {
  const SurfaceKind k = surface.kind();
  return k == SurfaceKind::Plane || k == SurfaceKind::Cylinder || k == SurfaceKind::Cone;
}

}  // namespace cadret::brep
