#include "cadret/brep/part.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cadret/core/error.hpp"

namespace cadret::brep {

const Face* BRepPart::find_face(std::string_view face_id) const noexcept {
  for (const Face& f : faces) {
    if (f.id == face_id) return &f;
  }
  return nullptr;
}

const Curve* BRepPart::find_curve(std::string_view curve_id) const noexcept {
  for (const Curve& c : curves) {
    if (c.id == curve_id) return &c;
  }
  return nullptr;
}

void validate(const BRepPart& part) {
  const std::string where = "part '" + part.id + "': ";
  require(!part.faces.empty(), ErrorKind::Contract, where + "face set is empty");

  std::set<std::string_view> ids;
  for (const Face& f : part.faces) {
    require(ids.insert(f.id).second, ErrorKind::Contract, where + "duplicate id '" + f.id + "'");
  }
  for (const Curve& c : part.curves) {
    require(ids.insert(c.id).second, ErrorKind::Contract, where + "duplicate id '" + c.id + "'");
  }

  for (const Face& f : part.faces) {
    try {
      validate(f.surface);
    } catch (const Error& e) {
      fail(e.kind(), where + "face '" + f.id + "': " + e.what());
    }
    require(f.domain.u1 > f.domain.u0 && f.domain.v1 > f.domain.v0, ErrorKind::Contract,
            where + "face '" + f.id + "' has a uv-domain with non-positive area");
    for (const auto& loop : f.loops) {
      for (const std::string& cid : loop) {
        require(part.find_curve(cid) != nullptr, ErrorKind::Contract,
                where + "face '" + f.id + "' loop references unknown curve '" + cid + "'");
      }
    }
  }
  for (const Curve& c : part.curves) {
    try {
      validate(c.geometry);
    } catch (const Error& e) {
      fail(e.kind(), where + "curve '" + c.id + "': " + e.what());
    }
    std::set<std::string_view> seen;
    for (const std::string& fid : c.adjacent_faces) {
      require(seen.insert(fid).second, ErrorKind::Contract,
              where + "curve '" + c.id + "' lists face '" + fid + "' twice");
      require(part.find_face(fid) != nullptr, ErrorKind::Contract,
              where + "curve '" + c.id + "' references unknown face '" + fid + "'");
    }
  }
}

SurfacePoint evaluate_face(const Face& face, double s, double t) {
  Vec2 uv = face.domain.at(s, t);
  return evaluate_surface(face.surface, uv.x(), uv.y());
}

BoundingBox bounding_box(const BRepPart& part) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{Vec3::Constant(inf), Vec3::Constant(-inf)};
  auto add = [&](const Vec3& p) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  };
  constexpr int kFaceSamples = 17;
  for (const Face& f : part.faces) {
    for (int i = 0; i < kFaceSamples; ++i) {
      for (int j = 0; j < kFaceSamples; ++j) {
        add(evaluate_face(f, i / double(kFaceSamples - 1), j / double(kFaceSamples - 1)).point);
      }
    }
  }
  constexpr int kCurveSamples = 33;
  for (const Curve& c : part.curves) {
    const CurveGeometry& g = c.geometry;
    for (int i = 0; i < kCurveSamples; ++i) {
      double t = g.t0 + (g.t1 - g.t0) * (i / double(kCurveSamples - 1));
      add(evaluate_curve(g, std::min(t, g.t1)).point);
    }
  }
  return box;
}

BRepPart transform_part(const BRepPart& part, const SimilarityMap& map) {
  BRepPart out = part;
  for (Face& f : out.faces) {
    const bool su = scales_u(f.surface), sv = scales_v(f.surface);
    f.surface = transform(f.surface, map);
    if (su) {
      f.domain.u0 *= map.scale;
      f.domain.u1 *= map.scale;
    }
    if (sv) {
      f.domain.v0 *= map.scale;
      f.domain.v1 *= map.scale;
    }
  }
  for (Curve& c : out.curves) c.geometry = transform(c.geometry, map);
  return out;
}

BRepPart normalize_part(const BRepPart& part) {
  BoundingBox box = bounding_box(part);
  const double longest = box.extent().maxCoeff();
  const double reach = std::max(1.0, box.center().cwiseAbs().maxCoeff());
  if (!(longest > 1e-12 * reach) || !std::isfinite(longest)) {
    fail(ErrorKind::Degenerate, "part '" + part.id + "' has a zero-extent bounding box");
  }
  return transform_part(part, SimilarityMap{box.center(), 2.0 / longest});
}

}  // namespace cadret::brep
