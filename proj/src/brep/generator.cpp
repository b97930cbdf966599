#include "cadret/brep/generator.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cadret/core/error.hpp"
#include "cadret/core/rng.hpp"

namespace cadret::brep {
namespace {

constexpr double kPi = std::numbers::pi;
const Vec3 kX{1, 0, 0};
const Vec3 kY{0, 1, 0};
const Vec3 kZ{0, 0, 1};

std::string numbered(char prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03zu", prefix, i);
  return buf;
}

// Accumulates faces and curves; face slots are reserved up front so curves can
// name their adjacent faces before the face geometry is known.
class Builder {
 public:
  Builder(std::string id, std::map<std::string, AttrValue> attrs)
      : attrs_(std::move(attrs)) {
    part_.id = std::move(id);
  }

  std::string reserve_face() {
    Face f;
    f.id = numbered('f', part_.faces.size());
    f.attrs = attrs_;
    part_.faces.push_back(std::move(f));
    return part_.faces.back().id;
  }

  std::string curve(CurveGeometry g, std::vector<std::string> adjacent) {
    Curve c;
    c.id = numbered('c', part_.curves.size());
    c.geometry = std::move(g);
    c.adjacent_faces = std::move(adjacent);
    part_.curves.push_back(std::move(c));
    return part_.curves.back().id;
  }

  std::string line(const Vec3& a, const Vec3& b, std::vector<std::string> adjacent) {
    return curve(CurveGeometry{Line{a, b}, 0.0, 1.0}, std::move(adjacent));
  }

  std::string circle(const Vec3& center, double radius, std::vector<std::string> adjacent) {
    return curve(CurveGeometry{Circle{center, kZ, kX, radius}, 0.0, 2 * kPi}, std::move(adjacent));
  }

  void set_face(const std::string& id, SurfaceGeometry s, UvDomain d,
                std::vector<std::vector<std::string>> loops = {}) {
    Face& f = face(id);
    f.surface = std::move(s);
    f.domain = d;
    f.loops = std::move(loops);
  }

  // Planar face whose uv-domain is the bounding rectangle of its first loop.
  void set_plane(const std::string& id, const Vec3& origin, const Vec3& normal, const Vec3& ref,
                 std::vector<std::vector<std::string>> loops) {
    SurfaceGeometry s{Plane{origin, normal, ref}, false};
    double u0 = 1e300, u1 = -1e300, v0 = 1e300, v1 = -1e300;
    for (const std::string& cid : loops.front()) {
      const CurveGeometry& g = curve_geometry(cid);
      constexpr int kSamples = 64;
      for (int i = 0; i <= kSamples; ++i) {
        double t = g.t0 + (g.t1 - g.t0) * (i / double(kSamples));
        Vec2 uv = project_to_uv(s, evaluate_curve(g, std::min(t, g.t1)).point);
        u0 = std::min(u0, uv.x());
        u1 = std::max(u1, uv.x());
        v0 = std::min(v0, uv.y());
        v1 = std::max(v1, uv.y());
      }
    }
    set_face(id, s, UvDomain{u0, u1, v0, v1}, std::move(loops));
  }

  BRepPart finish() {
    validate(part_);
    return std::move(part_);
  }

 private:
  Face& face(const std::string& id) {
    for (Face& f : part_.faces) {
      if (f.id == id) return f;
    }
    fail(ErrorKind::Contract, "unknown face " + id);
  }

  const CurveGeometry& curve_geometry(const std::string& id) const {
    const Curve* c = part_.find_curve(id);
    if (!c) fail(ErrorKind::Contract, "unknown curve " + id);
    return c->geometry;
  }

  BRepPart part_;
  std::map<std::string, AttrValue> attrs_;
};

Vec3 at(const Vec2& p, double z) { return {p.x(), p.y(), z}; }

struct CircleHole {
  Vec2 center;
  double radius;
};

struct Profile {
  std::vector<Vec2> outer;                    // counter-clockwise
  std::vector<std::vector<Vec2>> polygon_holes;  // counter-clockwise
  std::vector<CircleHole> circle_holes;
};

// Side walls of a closed polygon between z=0 and z=h. Walls face away from
// the material: for the outer boundary the polygon is CCW; hole polygons are
// traversed clockwise so the same rule applies.
void extrude_ring(Builder& b, const std::vector<Vec2>& poly, double h, const std::string& bottom,
                  const std::string& top, std::vector<std::string>& bottom_loop,
                  std::vector<std::string>& top_loop) {
  const std::size_t n = poly.size();
  std::vector<std::string> walls;
  for (std::size_t i = 0; i < n; ++i) walls.push_back(b.reserve_face());
  std::vector<std::string> vertical(n), lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    lower[i] = b.line(at(p, 0), at(q, 0), {bottom, walls[i]});
    upper[i] = b.line(at(p, h), at(q, h), {top, walls[i]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    vertical[i] = b.line(at(poly[i], 0), at(poly[i], h), {walls[(i + n - 1) % n], walls[i]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    Vec3 dir = at(q - p, 0).normalized();
    Vec3 normal = dir.cross(kZ);
    b.set_plane(walls[i], at(p, 0), normal, dir, {{lower[i], vertical[(i + 1) % n], upper[i], vertical[i]}});
  }
  bottom_loop = lower;
  top_loop = upper;
}

void extrude(Builder& b, const Profile& profile, double h, const BezierSurface* freeform_top = nullptr) {
  const std::string bottom = b.reserve_face();
  const std::string top = b.reserve_face();
  std::vector<std::vector<std::string>> bottom_loops(1), top_loops(1);
  extrude_ring(b, profile.outer, h, bottom, top, bottom_loops[0], top_loops[0]);
  for (const auto& hole : profile.polygon_holes) {
    std::vector<Vec2> cw(hole.rbegin(), hole.rend());
    bottom_loops.emplace_back();
    top_loops.emplace_back();
    extrude_ring(b, cw, h, bottom, top, bottom_loops.back(), top_loops.back());
  }
  for (const CircleHole& hole : profile.circle_holes) {
    const std::string wall = b.reserve_face();
    bottom_loops.push_back({b.circle(at(hole.center, 0), hole.radius, {bottom, wall})});
    top_loops.push_back({b.circle(at(hole.center, h), hole.radius, {top, wall})});
    const Vec2 rim = hole.center + Vec2(hole.radius, 0);
    b.line(at(rim, 0), at(rim, h), {wall});
    b.set_face(wall, SurfaceGeometry{Cylinder{at(hole.center, 0), kZ, kX, hole.radius}, true},
               UvDomain{0, 2 * kPi, 0, h});
  }
  b.set_plane(bottom, Vec3::Zero(), -kZ, kX, bottom_loops);
  if (freeform_top) {
    b.set_face(top, SurfaceGeometry{*freeform_top, false}, UvDomain{0, 1, 0, 1});
  } else {
    b.set_plane(top, Vec3(0, 0, h), kZ, kX, top_loops);
  }
}

std::vector<Vec2> rectangle(double w, double d) {
  return {{-w / 2, -d / 2}, {w / 2, -d / 2}, {w / 2, d / 2}, {-w / 2, d / 2}};
}

// Disc or annulus cap at height z bounded by circles of the given radii.
void cap(Builder& b, const std::string& face, double z, bool up, const std::vector<std::string>& circles) {
  std::vector<std::vector<std::string>> loops;
  for (const std::string& c : circles) loops.push_back({c});
  b.set_plane(face, Vec3(0, 0, z), up ? kZ : -kZ, kX, std::move(loops));
}

void lateral(Builder& b, const std::string& face, double radius, double z0, double z1, bool inward = false) {
  b.set_face(face, SurfaceGeometry{Cylinder{Vec3(0, 0, z0), kZ, kX, radius}, inward},
             UvDomain{0, 2 * kPi, 0, z1 - z0});
}

void seam(Builder& b, double radius, double z0, double z1, const std::string& face) {
  b.line(Vec3(radius, 0, z0), Vec3(radius, 0, z1), {face});
}

class Params {
 public:
  explicit Params(const std::map<std::string, double>& v, std::string_view part) : v_(v), part_(part) {}

  double get(const std::string& name) const {
    auto it = v_.find(name);
    if (it == v_.end()) fail(ErrorKind::Spec, "part '" + part_ + "': missing parameter '" + name + "'");
    return it->second;
  }
  double positive(const std::string& name) const {
    double x = get(name);
    if (!(x > 0)) fail(ErrorKind::Spec, "part '" + part_ + "': parameter '" + name + "' must be positive");
    return x;
  }
  double ratio(const std::string& name) const {
    double x = get(name);
    if (!(x > 0 && x < 1)) {
      fail(ErrorKind::Spec, "part '" + part_ + "': parameter '" + name + "' must lie in (0, 1)");
    }
    return x;
  }

 private:
  const std::map<std::string, double>& v_;
  std::string part_;
};

BRepPart build(PartTemplate t, const Params& p, Builder b) {
  switch (t) {
    case PartTemplate::Box: {
      extrude(b, Profile{rectangle(p.positive("width"), p.positive("depth")), {}, {}}, p.positive("height"));
      break;
    }
    case PartTemplate::WavyPlate: {
      const double w = p.positive("width"), d = p.positive("depth"), h = p.positive("thickness");
      const double bump = p.get("bump");
      BezierSurface top{4, 4, {}};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          const bool interior = r > 0 && r < 3 && c > 0 && c < 3;
          top.control.emplace_back(-w / 2 + w * c / 3.0, -d / 2 + d * r / 3.0, interior ? h + bump : h);
        }
      }
      if (!(h + bump > 0)) fail(ErrorKind::Spec, "wavy plate bump pierces the bottom face");
      extrude(b, Profile{rectangle(w, d), {}, {}}, h, &top);
      break;
    }
    case PartTemplate::LBracket: {
      const double a = p.positive("width"), c = p.positive("height");
      const double tx = p.positive("thickness_x"), ty = p.positive("thickness_y");
      if (!(tx < a && ty < c)) fail(ErrorKind::Spec, "L-bracket legs thicker than the bracket");
      std::vector<Vec2> l{{0, 0}, {a, 0}, {a, ty}, {tx, ty}, {tx, c}, {0, c}};
      extrude(b, Profile{l, {}, {}}, p.positive("depth"));
      break;
    }
    case PartTemplate::HexPrism: {
      const double r = p.positive("radius");
      std::vector<Vec2> hex;
      for (int i = 0; i < 6; ++i) hex.emplace_back(r * std::cos(kPi * i / 3), r * std::sin(kPi * i / 3));
      extrude(b, Profile{hex, {}, {}}, p.positive("height"));
      break;
    }
    case PartTemplate::SlottedPlate: {
      const double w = p.positive("width"), d = p.positive("depth");
      const double sl = p.ratio("slot_length_ratio") * w, sw = p.ratio("slot_width_ratio") * d;
      extrude(b, Profile{rectangle(w, d), {rectangle(sl, sw)}, {}}, p.positive("thickness"));
      break;
    }
    case PartTemplate::BoxWithHoles: {
      const double w = p.positive("width"), d = p.positive("depth");
      const int n = static_cast<int>(std::lround(p.get("holes")));
      if (n < 1) fail(ErrorKind::Spec, "box with holes needs at least one hole");
      const double pitch = w / (n + 1);
      const double r = 0.5 * p.ratio("hole_ratio") * std::min(d, pitch);
      Profile prof{rectangle(w, d), {}, {}};
      for (int k = 0; k < n; ++k) prof.circle_holes.push_back({Vec2(-w / 2 + pitch * (k + 1), 0), r});
      extrude(b, prof, p.positive("height"));
      break;
    }
    case PartTemplate::CappedCylinder: {
      const double r = p.positive("radius"), h = p.positive("height");
      const std::string bottom = b.reserve_face(), side = b.reserve_face(), top = b.reserve_face();
      const std::string cb = b.circle(Vec3(0, 0, 0), r, {bottom, side});
      const std::string ct = b.circle(Vec3(0, 0, h), r, {top, side});
      seam(b, r, 0, h, side);
      cap(b, bottom, 0, false, {cb});
      lateral(b, side, r, 0, h);
      cap(b, top, h, true, {ct});
      break;
    }
    case PartTemplate::Ring: {
      const double ro = p.positive("outer_radius"), ri = p.ratio("inner_ratio") * ro;
      const double h = p.positive("height");
      const std::string bottom = b.reserve_face(), outer = b.reserve_face(), top = b.reserve_face(),
                        inner = b.reserve_face();
      const std::string cbo = b.circle(Vec3(0, 0, 0), ro, {bottom, outer});
      const std::string cbi = b.circle(Vec3(0, 0, 0), ri, {bottom, inner});
      const std::string cto = b.circle(Vec3(0, 0, h), ro, {top, outer});
      const std::string cti = b.circle(Vec3(0, 0, h), ri, {top, inner});
      seam(b, ro, 0, h, outer);
      seam(b, ri, 0, h, inner);
      cap(b, bottom, 0, false, {cbo, cbi});
      lateral(b, outer, ro, 0, h);
      cap(b, top, h, true, {cto, cti});
      lateral(b, inner, ri, 0, h, true);
      break;
    }
    case PartTemplate::SteppedShaft: {
      const double r1 = p.positive("radius"), r2 = p.ratio("radius_ratio") * r1;
      const double h1 = p.positive("height1"), h2 = p.positive("height2");
      const std::string bottom = b.reserve_face(), side1 = b.reserve_face(), step = b.reserve_face(),
                        side2 = b.reserve_face(), top = b.reserve_face();
      const std::string c0 = b.circle(Vec3(0, 0, 0), r1, {bottom, side1});
      const std::string c1 = b.circle(Vec3(0, 0, h1), r1, {side1, step});
      const std::string c2 = b.circle(Vec3(0, 0, h1), r2, {step, side2});
      const std::string c3 = b.circle(Vec3(0, 0, h1 + h2), r2, {side2, top});
      seam(b, r1, 0, h1, side1);
      seam(b, r2, h1, h1 + h2, side2);
      cap(b, bottom, 0, false, {c0});
      lateral(b, side1, r1, 0, h1);
      cap(b, step, h1, true, {c1, c2});
      lateral(b, side2, r2, h1, h1 + h2);
      cap(b, top, h1 + h2, true, {c3});
      break;
    }
    case PartTemplate::ConeFrustum: {
      const double rb = p.positive("bottom_radius"), rt = p.ratio("top_ratio") * rb;
      const double h = p.positive("height");
      const std::string bottom = b.reserve_face(), side = b.reserve_face(), top = b.reserve_face();
      const std::string cb = b.circle(Vec3(0, 0, 0), rb, {bottom, side});
      const std::string ct = b.circle(Vec3(0, 0, h), rt, {top, side});
      b.line(Vec3(rb, 0, 0), Vec3(rt, 0, h), {side});
      cap(b, bottom, 0, false, {cb});
      b.set_face(side, SurfaceGeometry{Cone{Vec3::Zero(), kZ, kX, rb, std::atan((rt - rb) / h)}, false},
                 UvDomain{0, 2 * kPi, 0, h});
      cap(b, top, h, true, {ct});
      break;
    }
    case PartTemplate::DomedCylinder: {
      const double r = p.positive("radius"), h = p.positive("height");
      const std::string bottom = b.reserve_face(), side = b.reserve_face(), dome = b.reserve_face();
      const std::string cb = b.circle(Vec3(0, 0, 0), r, {bottom, side});
      b.circle(Vec3(0, 0, h), r, {side, dome});
      seam(b, r, 0, h, side);
      b.curve(CurveGeometry{Circle{Vec3(0, 0, h), -kY, kX, r}, 0.0, kPi / 2}, {dome});
      cap(b, bottom, 0, false, {cb});
      lateral(b, side, r, 0, h);
      b.set_face(dome, SurfaceGeometry{Sphere{Vec3(0, 0, h), kZ, kX, r}, false},
                 UvDomain{0, 2 * kPi, 0, kPi / 2});
      break;
    }
    case PartTemplate::Torus: {
      const double big = p.positive("major_radius"), small = p.ratio("minor_ratio") * big;
      const std::string face = b.reserve_face();
      b.curve(CurveGeometry{Circle{Vec3::Zero(), kZ, kX, big + small}, 0.0, 2 * kPi}, {face});
      b.curve(CurveGeometry{Circle{Vec3(big, 0, 0), -kY, kX, small}, 0.0, 2 * kPi}, {face});
      b.set_face(face, SurfaceGeometry{brep::Torus{Vec3::Zero(), kZ, kX, big, small}, false},
                 UvDomain{0, 2 * kPi, 0, 2 * kPi});
      break;
    }
  }
  return b.finish();
}

struct TemplateInfo {
  PartTemplate shape;
  std::string_view name;
};

constexpr TemplateInfo kTemplates[] = {
    {PartTemplate::Box, "box"},
    {PartTemplate::CappedCylinder, "capped_cylinder"},
    {PartTemplate::LBracket, "l_bracket"},
    {PartTemplate::Ring, "ring"},
    {PartTemplate::SlottedPlate, "slotted_plate"},
    {PartTemplate::BoxWithHoles, "box_with_holes"},
    {PartTemplate::SteppedShaft, "stepped_shaft"},
    {PartTemplate::ConeFrustum, "cone_frustum"},
    {PartTemplate::HexPrism, "hex_prism"},
    {PartTemplate::DomedCylinder, "domed_cylinder"},
    {PartTemplate::WavyPlate, "wavy_plate"},
    {PartTemplate::Torus, "torus"},
};

std::string pick(Rng& rng, const std::string& preferred, double preference,
                 const std::vector<std::string>& vocab) {
  if (rng.bernoulli(preference)) return preferred;
  return vocab[rng.index(vocab.size())];
}

}  // namespace

std::string_view to_string(PartTemplate t) noexcept {
  for (const auto& info : kTemplates) {
    if (info.shape == t) return info.name;
  }
  return "unknown";
}

std::optional<PartTemplate> parse_template(std::string_view name) noexcept {
  for (const auto& info : kTemplates) {
    if (info.name == name) return info.shape;
  }
  return std::nullopt;
}

std::map<std::string, Range> default_params(PartTemplate t) {
  switch (t) {
    case PartTemplate::Box: return {{"width", {1.5, 2.5}}, {"depth", {1.0, 1.8}}, {"height", {0.6, 1.2}}};
    case PartTemplate::WavyPlate:
      return {{"width", {2.0, 3.0}}, {"depth", {1.5, 2.5}}, {"thickness", {0.3, 0.5}}, {"bump", {0.2, 0.5}}};
    case PartTemplate::LBracket:
      return {{"width", {1.5, 2.5}}, {"height", {1.5, 2.5}}, {"thickness_x", {0.25, 0.5}},
              {"thickness_y", {0.25, 0.5}}, {"depth", {0.8, 1.5}}};
    case PartTemplate::HexPrism: return {{"radius", {0.6, 1.0}}, {"height", {0.4, 1.6}}};
    case PartTemplate::SlottedPlate:
      return {{"width", {2.5, 3.5}}, {"depth", {1.2, 2.0}}, {"thickness", {0.2, 0.4}},
              {"slot_length_ratio", {0.4, 0.7}}, {"slot_width_ratio", {0.15, 0.35}}};
    case PartTemplate::BoxWithHoles:
      return {{"width", {2.5, 3.5}}, {"depth", {1.0, 1.6}}, {"height", {0.3, 0.6}},
              {"hole_ratio", {0.4, 0.7}}, {"holes", {2, 2}}};
    case PartTemplate::CappedCylinder: return {{"radius", {0.4, 0.8}}, {"height", {1.5, 3.0}}};
    case PartTemplate::Ring:
      return {{"outer_radius", {1.0, 1.5}}, {"inner_ratio", {0.5, 0.8}}, {"height", {0.3, 0.8}}};
    case PartTemplate::SteppedShaft:
      return {{"radius", {0.5, 0.8}}, {"radius_ratio", {0.4, 0.7}}, {"height1", {0.8, 1.5}},
              {"height2", {0.8, 1.5}}};
    case PartTemplate::ConeFrustum:
      return {{"bottom_radius", {0.8, 1.2}}, {"top_ratio", {0.3, 0.7}}, {"height", {0.8, 1.6}}};
    case PartTemplate::DomedCylinder: return {{"radius", {0.5, 0.8}}, {"height", {0.8, 1.6}}};
    case PartTemplate::Torus: return {{"major_radius", {1.0, 1.5}}, {"minor_ratio", {0.15, 0.4}}};
  }
  return {};
}

std::vector<FamilySpec> default_families() {
  auto fam = [](std::string name, PartTemplate t, std::string material, std::string finish) {
    FamilySpec f;
    f.name = std::move(name);
    f.shape = t;
    f.attrs.material = std::move(material);
    f.attrs.finish = std::move(finish);
    return f;
  };
  return {
      fam("box", PartTemplate::Box, "steel", "raw"),
      fam("capped_cylinder", PartTemplate::CappedCylinder, "steel", "polished"),
      fam("l_bracket", PartTemplate::LBracket, "aluminum", "anodized"),
      fam("ring", PartTemplate::Ring, "brass", "raw"),
      fam("slotted_plate", PartTemplate::SlottedPlate, "aluminum", "raw"),
      fam("box_with_holes", PartTemplate::BoxWithHoles, "steel", "painted"),
      fam("stepped_shaft", PartTemplate::SteppedShaft, "steel", "polished"),
      fam("cone_frustum", PartTemplate::ConeFrustum, "plastic", "painted"),
      fam("hex_prism", PartTemplate::HexPrism, "brass", "polished"),
      fam("domed_cylinder", PartTemplate::DomedCylinder, "plastic", "raw"),
  };
}

BRepPart build_part(PartTemplate t, const std::map<std::string, double>& values, const std::string& id,
                    const std::map<std::string, AttrValue>& attrs) {
  return build(t, Params(values, id), Builder(id, attrs));
}

std::vector<BRepPart> generate_synthetic_family(const FamilySpec& spec, int count, std::uint64_t seed) {
  require(count >= 0, ErrorKind::Spec, "family '" + spec.name + "': count must be non-negative");
  require(!spec.name.empty(), ErrorKind::Spec, "family name must not be empty");
  std::map<std::string, Range> ranges = default_params(spec.shape);
  for (const auto& [name, range] : spec.params) {
    if (!ranges.count(name)) {
      fail(ErrorKind::Spec, "family '" + spec.name + "': template '" + std::string(to_string(spec.shape)) +
                                "' has no parameter '" + name + "'");
    }
    if (!(range.lo <= range.hi)) {
      fail(ErrorKind::Spec, "family '" + spec.name + "': parameter '" + name + "' has lo > hi");
    }
    ranges[name] = range;
  }
  const AttrProfile& prof = spec.attrs;
  require(prof.preference >= 0 && prof.preference <= 1, ErrorKind::Spec,
          "family '" + spec.name + "': attribute preference must lie in [0, 1]");
  require(prof.roughness.lo <= prof.roughness.hi, ErrorKind::Spec,
          "family '" + spec.name + "': roughness range has lo > hi");

  Rng rng(derive_seed(seed, fnv1a64(spec.name)));
  std::vector<BRepPart> parts;
  parts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "-%03d", i);
    const std::string id = spec.name + idbuf;
    std::map<std::string, double> values;
    for (const auto& [name, range] : ranges) values[name] = rng.uniform(range.lo, range.hi);
    std::map<std::string, AttrValue> attrs;
    attrs["material"] = pick(rng, prof.material, prof.preference, material_vocabulary());
    attrs["finish"] = pick(rng, prof.finish, prof.preference, finish_vocabulary());
    attrs["roughness"] = rng.uniform(prof.roughness.lo, prof.roughness.hi);
    parts.push_back(build_part(spec.shape, values, id, attrs));
  }
  return parts;
}

nlohmann::json family_to_json(const FamilySpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, r] : spec.params) params[name] = {r.lo, r.hi};
  return {{"name", spec.name},
          {"template", std::string(to_string(spec.shape))},
          {"params", params},
          {"attrs",
           {{"material", spec.attrs.material},
            {"finish", spec.attrs.finish},
            {"preference", spec.attrs.preference},
            {"roughness", {spec.attrs.roughness.lo, spec.attrs.roughness.hi}}}}};
}

FamilySpec family_from_json(const nlohmann::json& j) {
  try {
    FamilySpec f;
    f.name = j.at("name").get<std::string>();
    const std::string tname = j.at("template").get<std::string>();
    auto t = parse_template(tname);
    if (!t) fail(ErrorKind::Spec, "unknown template '" + tname + "'");
    f.shape = *t;
    if (j.contains("params")) {
      for (const auto& [name, r] : j.at("params").items()) {
        if (!r.is_array() || r.size() != 2) fail(ErrorKind::Spec, "parameter '" + name + "' must be [lo, hi]");
        f.params[name] = Range{r[0].get<double>(), r[1].get<double>()};
      }
    }
    if (j.contains("attrs")) {
      const auto& a = j.at("attrs");
      f.attrs.material = a.value("material", f.attrs.material);
      f.attrs.finish = a.value("finish", f.attrs.finish);
      f.attrs.preference = a.value("preference", f.attrs.preference);
      if (a.contains("roughness")) {
        f.attrs.roughness = Range{a.at("roughness")[0].get<double>(), a.at("roughness")[1].get<double>()};
      }
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Spec, std::string("family spec: ") + e.what());
  }
}

}  // namespace cadret::brep
