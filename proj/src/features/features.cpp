#include "cadret/features/features.hpp"

#include <array>
#include <cmath>
#include <string>

#include "cadret/core/error.hpp"

namespace cadret::features {

using brep::Vec2;
using brep::Vec3;

std::uint32_t GraphFeatures::product_width() const noexcept {
  std::uint32_t w = 0;
  for (const ProductSlot& s : product_layout) w += s.width;
  return w;
}

bool operator==(const GraphFeatures& a, const GraphFeatures& b) {
  if (a.graph.part_id != b.graph.part_id || a.graph.nodes != b.graph.nodes) return false;
  if (a.graph.edges.size() != b.graph.edges.size()) return false;
  for (std::size_t i = 0; i < a.graph.edges.size(); ++i) {
    const auto& x = a.graph.edges[i];
    const auto& y = b.graph.edges[i];
    if (x.a != y.a || x.b != y.b || x.curve_id != y.curve_id) return false;
  }
  return a.nodes == b.nodes && a.edges == b.edges && a.grid == b.grid && a.product_layout == b.product_layout;
}

std::vector<ProductSlot> product_layout(const AttrSchema& schema) {
  std::vector<ProductSlot> out;
  for (const AttrDef& a : schema.attrs) out.push_back({a.type, a.width()});
  return out;
}

void dense_product(const FaceRawFeatures& face, std::span<const ProductSlot> layout, std::span<float> out) {
  std::vector<std::uint32_t> offset(layout.size() + 1, 0);
  for (std::size_t i = 0; i < layout.size(); ++i) offset[i + 1] = offset[i] + layout[i].width;
  require(out.size() == offset.back(), ErrorKind::Shape, "dense product buffer has the wrong width");
  std::fill(out.begin(), out.end(), 0.0f);
  for (const ProductValue& pv : face.product) {
    require(pv.attr < layout.size(), ErrorKind::Schema,
            "product attribute id " + std::to_string(pv.attr) + " outside the schema");
    const ProductSlot& slot = layout[pv.attr];
    if (slot.type == AttrType::Categorical) {
      const auto token = static_cast<std::uint32_t>(pv.value);
      require(token < slot.width, ErrorKind::Schema, "categorical token outside the vocabulary");
      out[offset[pv.attr] + token] = 1.0f;
    } else {
      out[offset[pv.attr]] = pv.value;
    }
  }
}

void validate(const GraphFeatures& gf) {
  brep::validate(gf.graph);
  require(gf.nodes.size() == gf.graph.nodes.size(), ErrorKind::Contract,
          "graph '" + gf.graph.part_id + "': node feature count differs from |V|");
  require(gf.edges.size() == gf.graph.edges.size(), ErrorKind::Contract,
          "graph '" + gf.graph.part_id + "': edge feature count differs from |E|");
  for (const FaceRawFeatures& f : gf.nodes) {
    require(f.uv_grid.size() == gf.grid.face_floats(), ErrorKind::Contract,
            "graph '" + gf.graph.part_id + "': face grid size mismatch");
  }
  for (const CurveRawFeatures& c : gf.edges) {
    require(c.t_grid.size() == gf.grid.curve_floats(), ErrorKind::Contract,
            "graph '" + gf.graph.part_id + "': curve grid size mismatch");
  }
}

TrimRegion::TrimRegion(const brep::Face& face, const brep::BRepPart& part) {
  const brep::UvDomain& d = face.domain;
  tolerance_ = 1e-7 * std::max(d.u1 - d.u0, d.v1 - d.v0);
  for (const auto& loop : face.loops) {
    for (const std::string& cid : loop) {
      const brep::Curve* curve = part.find_curve(cid);
      require(curve != nullptr, ErrorKind::Contract, "face '" + face.id + "': unknown loop curve '" + cid + "'");
      const brep::CurveGeometry& g = curve->geometry;
      const bool straight = g.kind() == brep::CurveKind::Line && face.surface.kind() == brep::SurfaceKind::Plane;
      const int samples = straight ? 1 : 64;
      std::optional<Vec2> prev;
      for (int i = 0; i <= samples; ++i) {
        const double t = i == samples ? g.t1 : g.t0 + (g.t1 - g.t0) * (i / double(samples));
        Vec2 uv = brep::project_to_uv(face.surface, brep::evaluate_curve(g, t).point, prev);
        if (!prev && brep::is_u_periodic(face.surface)) {
          // Bring the first sample into the face's periodic window.
          constexpr double two_pi = 2 * 3.14159265358979323846;
          while (uv.x() < d.u0 - tolerance_) uv.x() += two_pi;
          while (uv.x() >= d.u0 + two_pi - tolerance_) uv.x() -= two_pi;
        }
        if (prev) segments_.push_back({*prev, uv});
        prev = uv;
      }
    }
  }
}

bool TrimRegion::contains(double u, double v) const {
  if (segments_.empty()) return true;
  const Vec2 p(u, v);
  bool inside = false;
  for (const Segment& s : segments_) {
    const Vec2 ab = s.b - s.a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - s.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    if ((s.a + t * ab - p).norm() <= tolerance_) return true;
    // Half-open crossing rule along +u.
    if ((s.a.y() > v) != (s.b.y() > v)) {
      const double x = s.a.x() + (v - s.a.y()) * (s.b.x() - s.a.x()) / (s.b.y() - s.a.y());
      if (x > u) inside = !inside;
    }
  }
  return inside;
}

namespace {

template <typename Fn>
auto with_face_context(const brep::Face& face, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(e.kind(), "feature extraction failed on face '" + face.id + "': " + e.what());
  }
}

void put3(float* dst, const Vec3& v) {
  dst[0] = static_cast<float>(v.x());
  dst[1] = static_cast<float>(v.y());
  dst[2] = static_cast<float>(v.z());
}

}  // namespace

std::vector<float> sample_face_grid(const brep::Face& face, const brep::BRepPart& part, int gu, int gv) {
  require(gu >= 2 && gv >= 2, ErrorKind::Contract, "face grid needs at least 2 samples per direction");
  return with_face_context(face, [&] {
    const TrimRegion region(face, part);
    std::vector<float> grid(static_cast<std::size_t>(gu) * gv * kFaceChannels, 0.0f);
    for (int i = 0; i < gu; ++i) {
      for (int j = 0; j < gv; ++j) {
        const Vec2 uv = face.domain.at((i + 0.5) / gu, (j + 0.5) / gv);
        float* cell = grid.data() + (static_cast<std::size_t>(i) * gv + j) * kFaceChannels;
        if (!region.contains(uv.x(), uv.y())) continue;
        const brep::SurfacePoint sp = brep::evaluate_surface(face.surface, uv.x(), uv.y());
        put3(cell, sp.point);
        put3(cell + 3, sp.normal);
        cell[6] = 1.0f;
      }
    }
    return grid;
  });
}

std::vector<float> sample_curve_grid(const brep::Curve& curve, int gt) {
  require(gt >= 2, ErrorKind::Contract, "curve grid needs at least 2 samples");
  try {
    const brep::CurveGeometry& g = curve.geometry;
    std::vector<float> grid(static_cast<std::size_t>(gt) * kCurveChannels, 0.0f);
    for (int i = 0; i < gt; ++i) {
      const double t = i == gt - 1 ? g.t1 : g.t0 + (g.t1 - g.t0) * (i / double(gt - 1));
      const brep::CurvePoint cp = brep::evaluate_curve(g, t);
      put3(grid.data() + i * kCurveChannels, cp.point);
      put3(grid.data() + i * kCurveChannels + 3, cp.tangent);
    }
    return grid;
  } catch (const Error& e) {
    fail(e.kind(), "feature extraction failed on curve '" + curve.id + "': " + e.what());
  }
}

double face_area(const brep::Face& face, const brep::BRepPart& part) {
  static constexpr std::array<double, 4> x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
  static constexpr std::array<double, 4> w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};
  constexpr int kCells = 8;
  return with_face_context(face, [&] {
    const TrimRegion region(face, part);
    const brep::UvDomain& d = face.domain;
    const double hu = (d.u1 - d.u0) / kCells, hv = (d.v1 - d.v0) / kCells;
    double total = 0;
    for (int a = 0; a < kCells; ++a) {
      for (int b = 0; b < kCells; ++b) {
        const double cu = d.u0 + (a + 0.5) * hu, cv = d.v0 + (b + 0.5) * hv;
        for (std::size_t i = 0; i < x.size(); ++i) {
          for (std::size_t j = 0; j < x.size(); ++j) {
            const double u = cu + 0.5 * hu * x[i], v = cv + 0.5 * hv * x[j];
            if (!region.contains(u, v)) continue;
            total += w[i] * w[j] * brep::surface_jacobian(face.surface, u, v);
          }
        }
      }
    }
    return total * 0.25 * hu * hv;
  });
}

namespace {

std::vector<ProductValue> encode_product(const brep::Face& face, const AttrSchema& schema) {
  std::vector<ProductValue> out;
  for (const auto& [name, value] : face.attrs) {
    auto id = schema.find(name);
    if (!id) continue;
    const AttrDef& def = schema.attrs[*id];
    if (def.type == AttrType::Categorical) {
      const std::string* token = std::get_if<std::string>(&value);
      require(token != nullptr, ErrorKind::Schema,
              "face '" + face.id + "': attribute '" + name + "' must be categorical");
      out.push_back({*id, static_cast<float>(schema.token(*id, *token))});
    } else {
      const double* real = std::get_if<double>(&value);
      require(real != nullptr, ErrorKind::Schema, "face '" + face.id + "': attribute '" + name + "' must be real");
      out.push_back({*id, static_cast<float>((*real - def.mean) / def.stddev)});
    }
  }
  std::sort(out.begin(), out.end(), [](const ProductValue& a, const ProductValue& b) { return a.attr < b.attr; });
  return out;
}

}  // namespace

GraphFeatures extract_graph_features(const brep::BRepPart& part, const brep::PartGraph& graph,
                                     const AttrSchema& schema, GridSpec grid) {
  GraphFeatures gf;
  gf.graph = graph;
  gf.grid = grid;
  gf.product_layout = product_layout(schema);
  gf.nodes.reserve(graph.nodes.size());
  for (const std::string& fid : graph.nodes) {
    const brep::Face* face = part.find_face(fid);
    require(face != nullptr, ErrorKind::Contract, "graph node '" + fid + "' is not a face of the part");
    FaceRawFeatures f;
    f.uv_grid = sample_face_grid(*face, part, grid.gu, grid.gv);
    f.surface_type = static_cast<std::uint32_t>(face->surface.kind());
    f.area = static_cast<float>(face_area(*face, part));
    f.product = encode_product(*face, schema);
    gf.nodes.push_back(std::move(f));
  }
  gf.edges.reserve(graph.edges.size());
  for (const brep::GraphEdge& e : graph.edges) {
    const brep::Curve* curve = part.find_curve(e.curve_id);
    require(curve != nullptr, ErrorKind::Contract, "graph edge curve '" + e.curve_id + "' is not in the part");
    CurveRawFeatures c;
    c.t_grid = sample_curve_grid(*curve, grid.gt);
    c.curve_type = static_cast<std::uint32_t>(curve->geometry.kind());
    c.length = static_cast<float>(brep::curve_length(curve->geometry));
    gf.edges.push_back(std::move(c));
  }
  return gf;
}

Featurized featurize(const brep::BRepPart& part, const AttrSchema& schema, GridSpec grid) {
  const brep::BRepPart normalized = brep::normalize_part(part);
  brep::Conversion conv = brep::to_graph(normalized);
  return {extract_graph_features(normalized, conv.graph, schema, grid), std::move(conv.report)};
}

}  // namespace cadret::features
