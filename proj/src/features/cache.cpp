#include "cadret/features/cache.hpp"

#include <string>

#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"

namespace cadret::features {

namespace {

constexpr std::string_view kMagic = "CRGC";

}  // namespace

std::vector<std::uint8_t> encode_graph_cache(const std::vector<GraphFeatures>& graphs, const nlohmann::json& meta) {
  GridSpec grid;
  std::vector<ProductSlot> layout;
  if (!graphs.empty()) {
    grid = graphs.front().grid;
    layout = graphs.front().product_layout;
  }
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kGraphCacheVersion);
  w.str(meta.dump());
  w.u16(grid.gu);
  w.u16(grid.gv);
  w.u16(grid.gt);
  w.u32(static_cast<std::uint32_t>(layout.size()));
  for (const ProductSlot& s : layout) {
    w.u8(static_cast<std::uint8_t>(s.type));
    w.u32(s.width);
  }
  w.u32(static_cast<std::uint32_t>(graphs.size()));
  for (const GraphFeatures& gf : graphs) {
    validate(gf);
    require(gf.grid == grid && gf.product_layout == layout, ErrorKind::Contract,
            "graph '" + gf.graph.part_id + "': grid or product layout differs from the rest of the cache");
    w.str(gf.graph.part_id);
    w.u32(static_cast<std::uint32_t>(gf.graph.nodes.size()));
    w.u32(static_cast<std::uint32_t>(gf.graph.edges.size()));
    for (const std::string& id : gf.graph.nodes) w.str(id);
    for (const brep::GraphEdge& e : gf.graph.edges) {
      w.u32(e.a);
      w.u32(e.b);
      w.str(e.curve_id);
    }
    for (const FaceRawFeatures& f : gf.nodes) {
      w.u32(f.surface_type);
      w.f32(f.area);
      w.f32s(f.uv_grid);
      w.u32(static_cast<std::uint32_t>(f.product.size()));
      for (const ProductValue& p : f.product) {
        w.u32(p.attr);
        w.f32(p.value);
      }
    }
    for (const CurveRawFeatures& c : gf.edges) {
      w.u32(c.curve_type);
      w.f32(c.length);
      w.f32s(c.t_grid);
    }
  }
  return std::move(w).take();
}

std::vector<GraphFeatures> decode_graph_cache(std::span<const std::uint8_t> bytes, nlohmann::json* meta) {
  ByteReader r(bytes);
  require(r.remaining() >= kMagic.size() && r.raw(kMagic.size()) == kMagic, ErrorKind::Format,
          "not a graph cache (bad magic)");
  const std::uint8_t version = r.u8();
  require(version == kGraphCacheVersion, ErrorKind::Format,
          "unsupported graph cache version " + std::to_string(version));
  nlohmann::json header = nlohmann::json::parse(r.str(), nullptr, false);
  require(!header.is_discarded(), ErrorKind::Format, "graph cache metadata is not valid JSON");
  if (meta) *meta = std::move(header);
  GridSpec grid;
  grid.gu = r.u16();
  grid.gv = r.u16();
  grid.gt = r.u16();
  require(grid.gu >= 2 && grid.gv >= 2 && grid.gt >= 2, ErrorKind::Format, "graph cache grid dims below 2");
  std::vector<ProductSlot> layout(r.u32());
  for (ProductSlot& s : layout) {
    const std::uint8_t type = r.u8();
    require(type <= 1, ErrorKind::Format, "graph cache: bad attribute type");
    s.type = static_cast<AttrType>(type);
    s.width = r.u32();
  }
  const std::uint32_t count = r.u32();
  std::vector<GraphFeatures> out;
  out.reserve(count);
  for (std::uint32_t g = 0; g < count; ++g) {
    GraphFeatures gf;
    gf.grid = grid;
    gf.product_layout = layout;
    gf.graph.part_id = r.str();
    const std::uint32_t nv = r.u32(), ne = r.u32();
    // Each node and edge occupies far more than one byte, so this bounds allocation on corrupt input.
    require(std::size_t{nv} + ne <= r.remaining(), ErrorKind::Format, "graph cache: truncated record");
    gf.graph.nodes.resize(nv);
    for (std::string& id : gf.graph.nodes) id = r.str();
    gf.graph.edges.resize(ne);
    for (brep::GraphEdge& e : gf.graph.edges) {
      e.a = r.u32();
      e.b = r.u32();
      e.curve_id = r.str();
    }
    gf.nodes.resize(nv);
    for (FaceRawFeatures& f : gf.nodes) {
      f.surface_type = r.u32();
      f.area = r.f32();
      f.uv_grid.resize(grid.face_floats());
      r.f32s(f.uv_grid);
      const std::uint32_t np = r.u32();
      require(np <= layout.size(), ErrorKind::Format, "graph cache: too many product values");
      f.product.resize(np);
      for (ProductValue& p : f.product) {
        p.attr = r.u32();
        p.value = r.f32();
      }
    }
    gf.edges.resize(ne);
    for (CurveRawFeatures& c : gf.edges) {
      c.curve_type = r.u32();
      c.length = r.f32();
      c.t_grid.resize(grid.curve_floats());
      r.f32s(c.t_grid);
    }
    try {
      validate(gf);
    } catch (const Error& e) {
      fail(ErrorKind::Format, std::string("graph cache: ") + e.what());
    }
    out.push_back(std::move(gf));
  }
  require(r.done(), ErrorKind::Format, "graph cache: trailing bytes");
  return out;
}

void write_graph_cache(const std::filesystem::path& path, const std::vector<GraphFeatures>& graphs,
                       const nlohmann::json& meta) {
  write_file_atomic(path, encode_graph_cache(graphs, meta));
}

std::vector<GraphFeatures> read_graph_cache(const std::filesystem::path& path, nlohmann::json* meta) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  try {
    return decode_graph_cache(bytes, meta);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace cadret::features
