#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cadret/brep/graph.hpp"
#include "cadret/brep/part.hpp"
#include "cadret/features/schema.hpp"

namespace cadret::features {

// Face grid channels: point xyz, normal xyz, trimming mask.
inline constexpr int kFaceChannels = 7;
// Curve grid channels: point xyz, tangent xyz.
inline constexpr int kCurveChannels = 6;

struct GridSpec {
  std::uint16_t gu = 10;
  std::uint16_t gv = 10;
  std::uint16_t gt = 10;

  std::size_t face_floats() const noexcept { return std::size_t{gu} * gv * kFaceChannels; }
  std::size_t curve_floats() const noexcept { return std::size_t{gt} * kCurveChannels; }
  bool operator==(const GridSpec&) const = default;
};

// Token index (categorical, 0 = UNK) or standardized value (real).
struct ProductValue {
  std::uint32_t attr = 0;
  float value = 0;
  bool operator==(const ProductValue&) const = default;
};

struct FaceRawFeatures {
  std::vector<float> uv_grid;  // [gu][gv][7], row-major
  std::uint32_t surface_type = 0;
  float area = 0;
  std::vector<ProductValue> product;  // sorted by attr id
  bool operator==(const FaceRawFeatures&) const = default;
};

struct CurveRawFeatures {
  std::vector<float> t_grid;  // [gt][6]
  std::uint32_t curve_type = 0;
  float length = 0;
  bool operator==(const CurveRawFeatures&) const = default;
};

struct ProductSlot {
  AttrType type = AttrType::Categorical;
  std::uint32_t width = 1;
  bool operator==(const ProductSlot&) const = default;
};

// Raw feature payload of one part: features keyed by node / edge position.
struct GraphFeatures {
  brep::PartGraph graph;
  std::vector<FaceRawFeatures> nodes;
  std::vector<CurveRawFeatures> edges;
  GridSpec grid;
  std::vector<ProductSlot> product_layout;

  std::uint32_t product_width() const noexcept;
};

bool operator==(const GraphFeatures& a, const GraphFeatures& b);

std::vector<ProductSlot> product_layout(const AttrSchema& schema);

// Dense product vector: one-hot (vocabulary + UNK) per categorical slot, the
// standardized value per real slot, zeros for attributes the face lacks.
void dense_product(const FaceRawFeatures& face, std::span<const ProductSlot> layout, std::span<float> out);

// Throws Error(Contract) if the feature maps are not keyed exactly by V and E
// or the graph itself is invalid.
void validate(const GraphFeatures& gf);

// Grid of evaluations at the centres of a uniform Gu x Gv partition of the
// face uv-domain, so mean(mask) is the midpoint estimate of the trimmed
// fraction. Mask is 1 inside the trimming loops (even-odd rule,
// boundary counts as inside; a face without loops is untrimmed). Masked-out
// samples carry zeros in the point and normal channels.
std::vector<float> sample_face_grid(const brep::Face& face, const brep::BRepPart& part, int gu, int gv);

// Uniform samples over [t0, t1], endpoints included.
std::vector<float> sample_curve_grid(const brep::Curve& curve, int gt);

// Trimmed face area: composite Gauss-Legendre of the surface Jacobian over the
// uv-domain with the trimming mask applied at the quadrature nodes.
double face_area(const brep::Face& face, const brep::BRepPart& part);

// True when (u, v) lies inside the face's trimming loops.
class TrimRegion {
 public:
  TrimRegion(const brep::Face& face, const brep::BRepPart& part);
  bool contains(double u, double v) const;
  bool trimmed() const noexcept { return !segments_.empty(); }

 private:
  struct Segment {
    brep::Vec2 a, b;
  };
  std::vector<Segment> segments_;
  double tolerance_ = 0;
};

// pre: part already normalized and graph derived from it.
// Throws Error(Schema) when an attribute value has the wrong type for the
// schema; Error(Domain) (with the face id) when evaluation fails.
GraphFeatures extract_graph_features(const brep::BRepPart& part, const brep::PartGraph& graph,
                                     const AttrSchema& schema, GridSpec grid = {});

struct Featurized {
  GraphFeatures features;
  brep::ConversionReport report;
};

// normalize_part -> to_graph -> extract_graph_features.
Featurized featurize(const brep::BRepPart& part, const AttrSchema& schema, GridSpec grid = {});

}  // namespace cadret::features
