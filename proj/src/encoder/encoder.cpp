#include "cadret/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cadret/core/error.hpp"
#include "cadret/core/hash.hpp"
#include "cadret/core/rng.hpp"

namespace cadret::encoder {

using nn::Shape;
using nn::Tensor;
using nn::Var;

void validate(const EncoderConfig& c) {
  auto need = [](bool ok, const std::string& what) { require(ok, ErrorKind::Config, "encoder config: " + what); };
  need(c.node_dim > 0 && c.graph_dim > 0 && c.layers > 0, "node_dim, graph_dim and layers must be positive");
  need(c.node_uv + c.node_geo + c.node_product == c.node_dim,
       "node sub-widths " + std::to_string(c.node_uv) + "+" + std::to_string(c.node_geo) + "+" +
           std::to_string(c.node_product) + " must sum to node_dim " + std::to_string(c.node_dim));
  need(c.edge_dim() == c.node_dim, "edge sub-widths " + std::to_string(c.edge_uv) + "+" + std::to_string(c.edge_geo) +
                                       " must sum to node_dim " + std::to_string(c.node_dim) +
                                       " (the gate multiplies edge and node embeddings elementwise)");
  need(c.node_uv > 0 && c.node_geo > 0 && c.node_product > 0 && c.edge_uv > 0 && c.edge_geo > 0,
       "sub-widths must be positive");
  need(!c.cnn2d_channels.empty() && !c.cnn1d_channels.empty(), "CNN channel plans must be non-empty");
  for (auto ch : c.cnn2d_channels) need(ch > 0, "CNN channels must be positive");
  for (auto ch : c.cnn1d_channels) need(ch > 0, "CNN channels must be positive");
  need(c.kernel % 2 == 1, "kernel size must be odd");
  need(c.geo_hidden > 0 && c.product_hidden > 0, "MLP hidden widths must be positive");
  need(c.grid.gu >= 2 && c.grid.gv >= 2 && c.grid.gt >= 2, "grid dims must be at least 2");
  need(c.surface_types > 0 && c.curve_types > 0, "type bank sizes must be positive");
}

nlohmann::json config_to_json(const EncoderConfig& c) {
  return {{"node_dim", c.node_dim},
          {"graph_dim", c.graph_dim},
          {"layers", c.layers},
          {"node_uv", c.node_uv},
          {"node_geo", c.node_geo},
          {"node_product", c.node_product},
          {"edge_uv", c.edge_uv},
          {"edge_geo", c.edge_geo},
          {"cnn2d_channels", c.cnn2d_channels},
          {"cnn1d_channels", c.cnn1d_channels},
          {"kernel", c.kernel},
          {"geo_hidden", c.geo_hidden},
          {"product_hidden", c.product_hidden},
          {"gate", c.gate == Gate::Sigmoid ? "sigmoid" : "learned"},
          {"readout_include_input", c.readout_include_input},
          {"grid", {c.grid.gu, c.grid.gv, c.grid.gt}},
          {"product_width", c.product_width},
          {"surface_types", c.surface_types},
          {"curve_types", c.curve_types}};
}

EncoderConfig config_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  try {
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    opt("node_dim", c.node_dim);
    opt("graph_dim", c.graph_dim);
    opt("layers", c.layers);
    opt("node_uv", c.node_uv);
    opt("node_geo", c.node_geo);
    opt("node_product", c.node_product);
    opt("edge_uv", c.edge_uv);
    opt("edge_geo", c.edge_geo);
    opt("cnn2d_channels", c.cnn2d_channels);
    opt("cnn1d_channels", c.cnn1d_channels);
    opt("kernel", c.kernel);
    opt("geo_hidden", c.geo_hidden);
    opt("product_hidden", c.product_hidden);
    opt("readout_include_input", c.readout_include_input);
    opt("product_width", c.product_width);
    opt("surface_types", c.surface_types);
    opt("curve_types", c.curve_types);
    if (j.contains("gate")) {
      const std::string g = j.at("gate").get<std::string>();
      if (g == "sigmoid") {
        c.gate = Gate::Sigmoid;
      } else if (g == "learned") {
        c.gate = Gate::Learned;
      } else {
        fail(ErrorKind::Config, "encoder config: unknown gate '" + g + "'");
      }
    }
    if (j.contains("grid")) {
      const auto dims = j.at("grid").get<std::vector<std::uint16_t>>();
      require(dims.size() == 3, ErrorKind::Config, "encoder config: grid must be [gu, gv, gt]");
      c.grid = {dims[0], dims[1], dims[2]};
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("encoder config: ") + e.what());
  }
  validate(c);
  return c;
}

EncoderConfig default_config(const features::AttrSchema& schema, features::GridSpec grid) {
  EncoderConfig c;
  c.grid = grid;
  c.product_width = schema.dense_width();
  return c;
}

template <typename T>
std::size_t EncoderParams<T>::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  require(it != names.end(), ErrorKind::Config, "encoder parameter '" + name + "' missing");
  return static_cast<std::size_t>(it - names.begin());
}

template <typename T>
std::size_t EncoderParams<T>::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

namespace {

using Layout = std::vector<std::pair<std::string, Shape>>;

void add_mlp(Layout& out, const std::string& prefix, std::size_t in, std::size_t hidden, std::size_t width) {
  out.push_back({prefix + ".l0.w", {in, hidden}});
  out.push_back({prefix + ".l0.b", {hidden}});
  out.push_back({prefix + ".l1.w", {hidden, width}});
  out.push_back({prefix + ".l1.b", {width}});
}

void add_cnn(Layout& out, const std::string& prefix, std::size_t in_channels, const std::vector<std::uint32_t>& plan,
             std::size_t taps, std::size_t width) {
  std::size_t c = in_channels;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out.push_back({prefix + ".conv" + std::to_string(i) + ".w", {taps * c, plan[i]}});
    out.push_back({prefix + ".conv" + std::to_string(i) + ".b", {plan[i]}});
    c = plan[i];
  }
  out.push_back({prefix + ".dense.w", {c, width}});
  out.push_back({prefix + ".dense.b", {width}});
}

std::uint32_t first_readout_layer(const EncoderConfig& c) { return c.readout_include_input ? 0 : 1; }

}  // namespace

std::vector<std::pair<std::string, Shape>> parameter_layout(const EncoderConfig& c) {
  validate(c);
  Layout out;
  add_cnn(out, "cnn2d", features::kFaceChannels, c.cnn2d_channels, std::size_t{c.kernel} * c.kernel, c.node_uv);
  add_cnn(out, "cnn1d", features::kCurveChannels, c.cnn1d_channels, c.kernel, c.edge_uv);
  for (std::uint32_t t = 0; t < c.surface_types; ++t) add_mlp(out, "surface" + std::to_string(t), 1, c.geo_hidden, c.node_geo);
  for (std::uint32_t t = 0; t < c.curve_types; ++t) add_mlp(out, "curve" + std::to_string(t), 1, c.geo_hidden, c.edge_geo);
  add_mlp(out, "product", std::max<std::uint32_t>(c.product_width, 1), c.product_hidden, c.node_product);
  const std::size_t d = c.node_dim;
  for (std::uint32_t k = 1; k <= c.layers; ++k) {
    const std::string p = "mp" + std::to_string(k);
    add_mlp(out, p + ".f", d, d, d);
    add_mlp(out, p + ".g1", d, d, d);
    add_mlp(out, p + ".g2", d, d, d);
    if (c.gate == Gate::Learned) {
      out.push_back({p + ".gate.w", {d, d}});
      out.push_back({p + ".gate.b", {d}});
    }
  }
  for (std::uint32_t k = first_readout_layer(c); k <= c.layers; ++k) {
    out.push_back({"readout" + std::to_string(k) + ".w", {d, c.graph_dim}});
    out.push_back({"readout" + std::to_string(k) + ".b", {c.graph_dim}});
  }
  return out;
}

EncoderParams<float> init_params(const EncoderConfig& cfg, std::uint64_t seed) {
  EncoderParams<float> p;
  p.config = cfg;
  for (auto& [name, shape] : parameter_layout(cfg)) {
    // Weights [fan_in, out]; a bias shares the fan-in of its weight.
    std::size_t fan_in = shape.size() == 2 ? shape[0] : 0;
    if (shape.size() == 1) {
      const std::string wname = name.substr(0, name.size() - 1) + "w";
      for (std::size_t i = 0; i < p.names.size(); ++i) {
        if (p.names[i] == wname) fan_in = p.tensors[i].dim(0);
      }
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    Rng rng(derive_seed(seed, fnv1a64(name)));
    Tensor<float> t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform(-bound, bound));
    p.names.push_back(name);
    p.tensors.push_back(std::move(t));
  }
  return p;
}

nn::Checkpoint to_checkpoint(const EncoderParams<float>& params, nlohmann::json manifest) {
  nn::Checkpoint ck;
  ck.manifest = std::move(manifest);
  ck.manifest["encoder"] = config_to_json(params.config);
  for (std::size_t i = 0; i < params.count(); ++i) ck.tensors.push_back({params.names[i], params.tensors[i]});
  return ck;
}

EncoderParams<float> from_checkpoint(const nn::Checkpoint& ckpt) {
  require(ckpt.manifest.is_object() && ckpt.manifest.contains("encoder"), ErrorKind::Config,
          "checkpoint manifest has no encoder config");
  EncoderParams<float> p;
  p.config = config_from_json(ckpt.manifest.at("encoder"));
  const auto layout = parameter_layout(p.config);
  require(layout.size() == ckpt.tensors.size(), ErrorKind::Config,
          "checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, config implies " +
              std::to_string(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const nn::NamedTensor& t = ckpt.tensors[i];
    require(t.name == layout[i].first && t.value.shape() == layout[i].second, ErrorKind::Config,
            "checkpoint tensor " + std::to_string(i) + " is '" + t.name + "' " + nn::to_string(t.value.shape()) +
                ", config expects '" + layout[i].first + "' " + nn::to_string(layout[i].second));
    require(t.value.all_finite(), ErrorKind::Numeric, "checkpoint tensor '" + t.name + "' has non-finite values");
    p.names.push_back(t.name);
    p.tensors.push_back(t.value);
  }
  return p;
}

std::string parameter_hash(const EncoderParams<float>& params) {
  return nn::parameter_hash(to_checkpoint(params).tensors);
}

template <typename T>
PreparedGraph<T> prepare(const features::GraphFeatures& gf, const EncoderConfig& cfg) {
  features::validate(gf);
  const std::size_t V = gf.graph.nodes.size(), E = gf.graph.edges.size();
  require(V > 0, ErrorKind::Contract, "graph '" + gf.graph.part_id + "' has no nodes");
  require(gf.grid == cfg.grid, ErrorKind::Config,
          "graph '" + gf.graph.part_id + "' was sampled on a different grid than the encoder expects");
  require(gf.product_width() == cfg.product_width, ErrorKind::Config,
          "graph '" + gf.graph.part_id + "' has product width " + std::to_string(gf.product_width()) +
              ", encoder expects " + std::to_string(cfg.product_width));

  std::vector<std::uint32_t> order(V);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return gf.graph.nodes[a] < gf.graph.nodes[b]; });
  std::vector<std::uint32_t> rank(V);
  for (std::uint32_t i = 0; i < V; ++i) rank[order[i]] = i;

  PreparedGraph<T> g;
  g.part_id = gf.graph.part_id;
  const auto& grid = gf.grid;
  g.uv = Tensor<T>({V, grid.gu, grid.gv, static_cast<std::size_t>(features::kFaceChannels)});
  g.area = Tensor<T>({V, 1});
  g.product = Tensor<T>({V, std::max<std::size_t>(cfg.product_width, 1)});
  std::vector<float> dense(cfg.product_width);
  const std::size_t face_floats = grid.face_floats();
  for (std::uint32_t i = 0; i < V; ++i) {
    const features::FaceRawFeatures& f = gf.nodes[order[i]];
    require(f.surface_type < cfg.surface_types, ErrorKind::Routing,
            "graph '" + g.part_id + "': surface type " + std::to_string(f.surface_type) + " outside the bank of " +
                std::to_string(cfg.surface_types));
    g.node_ids.push_back(gf.graph.nodes[order[i]]);
    g.surface.push_back(f.surface_type);
    std::copy(f.uv_grid.begin(), f.uv_grid.end(), g.uv.data() + i * face_floats);
    g.area[i] = static_cast<T>(f.area);
    features::dense_product(f, gf.product_layout, dense);
    std::copy(dense.begin(), dense.end(), g.product.data() + i * g.product.dim(1));
  }

  std::vector<std::uint32_t> eorder(E);
  std::iota(eorder.begin(), eorder.end(), 0u);
  auto key = [&](std::uint32_t k) {
    const auto& e = gf.graph.edges[k];
    const std::uint32_t a = rank[e.a], b = rank[e.b];
    return std::tuple<std::uint32_t, std::uint32_t, const std::string&>(std::min(a, b), std::max(a, b), e.curve_id);
  };
  std::sort(eorder.begin(), eorder.end(), [&](std::uint32_t x, std::uint32_t y) { return key(x) < key(y); });
  g.curve_grid = Tensor<T>({E, grid.gt, static_cast<std::size_t>(features::kCurveChannels)});
  g.length = Tensor<T>({E, 1});
  const std::size_t curve_floats = grid.curve_floats();
  for (std::uint32_t j = 0; j < E; ++j) {
    const features::CurveRawFeatures& c = gf.edges[eorder[j]];
    require(c.curve_type < cfg.curve_types, ErrorKind::Routing,
            "graph '" + g.part_id + "': curve type " + std::to_string(c.curve_type) + " outside the bank of " +
                std::to_string(cfg.curve_types));
    const auto [a, b, id] = key(eorder[j]);
    g.src.push_back(a);
    g.dst.push_back(b);
    g.curve.push_back(c.curve_type);
    std::copy(c.t_grid.begin(), c.t_grid.end(), g.curve_grid.data() + j * curve_floats);
    g.length[j] = static_cast<T>(c.length);
  }
  return g;
}

template <typename T>
std::vector<Var<T>> bind(nn::Tape<T>& tape, const EncoderParams<T>& params) {
  std::vector<Var<T>> out;
  out.reserve(params.count());
  for (const auto& t : params.tensors) out.push_back(tape.param(t));
  return out;
}

namespace {

template <typename T>
struct Binder {
  const EncoderParams<T>& params;
  const std::vector<Var<T>>& bound;
  Var<T> operator()(const std::string& name) const { return bound[params.index(name)]; }
};

template <typename T>
Var<T> mlp(const Binder<T>& p, const std::string& prefix, Var<T> x) {
  Var<T> h = nn::relu(nn::add_bias(nn::matmul(x, p(prefix + ".l0.w")), p(prefix + ".l0.b")));
  return nn::add_bias(nn::matmul(h, p(prefix + ".l1.w")), p(prefix + ".l1.b"));
}

// x [B, ..., C] grid batch -> [B, width].
template <typename T>
Var<T> cnn(const Binder<T>& p, const std::string& prefix, Var<T> x, std::size_t layers, std::size_t kernel, bool two_d) {
  for (std::size_t i = 0; i < layers; ++i) {
    const std::string c = prefix + ".conv" + std::to_string(i);
    x = two_d ? nn::conv2d(x, p(c + ".w"), p(c + ".b"), kernel, kernel) : nn::conv1d(x, p(c + ".w"), p(c + ".b"), kernel);
    x = nn::relu(x);
  }
  x = two_d ? nn::adaptive_avg_pool2d(x, 1, 1) : nn::adaptive_avg_pool1d(x, 1);
  const nn::Shape& s = x.shape();
  x = nn::reshape(x, {s.front(), s.back()});
  return nn::add_bias(nn::matmul(x, p(prefix + ".dense.w")), p(prefix + ".dense.b"));
}

// Routes each row through the bank member of its type; rows keep their position.
template <typename T>
Var<T> routed_mlp(nn::Tape<T>& tape, const Binder<T>& p, const std::string& bank, std::uint32_t bank_size,
                  const std::vector<std::uint32_t>& types, Var<T> x, std::size_t width) {
  const std::size_t rows = types.size();
  Var<T> out = tape.constant(Tensor<T>({rows, width}));
  for (std::uint32_t t = 0; t < bank_size; ++t) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t r = 0; r < rows; ++r) {
      if (types[r] == t) idx.push_back(r);
    }
    if (idx.empty()) continue;
    Var<T> y = mlp(p, bank + std::to_string(t), nn::gather_rows<T>(x, idx));
    out = nn::add(out, nn::scatter_add_rows<T>(y, idx, rows));
  }
  return out;
}

}  // namespace

template <typename T>
Embedded<T> embed_inputs(nn::Tape<T>& tape, const EncoderParams<T>& params, const std::vector<Var<T>>& bound,
                         const PreparedGraph<T>& g) {
  const EncoderConfig& c = params.config;
  const Binder<T> p{params, bound};
  Var<T> node_uv = cnn(p, "cnn2d", tape.constant(g.uv), c.cnn2d_channels.size(), c.kernel, true);
  Var<T> node_geo = routed_mlp(tape, p, "surface", c.surface_types, g.surface, tape.constant(g.area), c.node_geo);
  Var<T> node_product = mlp(p, "product", tape.constant(g.product));
  Var<T> edge_uv = cnn(p, "cnn1d", tape.constant(g.curve_grid), c.cnn1d_channels.size(), c.kernel, false);
  Var<T> edge_geo = routed_mlp(tape, p, "curve", c.curve_types, g.curve, tape.constant(g.length), c.edge_geo);
  return {nn::concat<T>({node_uv, node_geo, node_product}, 1), nn::concat<T>({edge_uv, edge_geo}, 1)};
}

template <typename T>
std::pair<Var<T>, Var<T>> message_passing_layer(nn::Tape<T>& tape, const EncoderParams<T>& params,
                                                const std::vector<Var<T>>& bound, std::uint32_t layer, Var<T> h,
                                                Var<T> e, const PreparedGraph<T>& g) {
  (void)tape;
  const Binder<T> p{params, bound};
  const std::string prefix = "mp" + std::to_string(layer);
  const std::size_t V = g.nodes();
  Var<T> gate = params.config.gate == Gate::Sigmoid
                    ? nn::sigmoid(e)
                    : nn::sigmoid(nn::add_bias(nn::matmul(e, p(prefix + ".gate.w")), p(prefix + ".gate.b")));
  Var<T> h_src = nn::gather_rows<T>(h, g.src);
  Var<T> h_dst = nn::gather_rows<T>(h, g.dst);
  // Each undirected edge sends gate * h_dst to src and gate * h_src to dst.
  Var<T> messages = nn::concat<T>({nn::mul(gate, h_dst), nn::mul(gate, h_src)}, 0);
  std::vector<std::uint32_t> targets(g.src);
  targets.insert(targets.end(), g.dst.begin(), g.dst.end());
  Var<T> aggregated = nn::scatter_add_rows<T>(messages, targets, V);
  Var<T> h_next = mlp(p, prefix + ".f", nn::add(h, aggregated));
  Var<T> e_next = mlp(p, prefix + ".g1", nn::add(e, mlp(p, prefix + ".g2", nn::add(h_src, h_dst))));
  return {h_next, e_next};
}

template <typename T>
Var<T> readout(const EncoderParams<T>& params, const std::vector<Var<T>>& bound, const std::vector<Var<T>>& h) {
  const Binder<T> p{params, bound};
  const std::uint32_t first = first_readout_layer(params.config);
  require(h.size() == params.config.layers + 1, ErrorKind::Contract, "readout needs h_0..h_K");
  require(h.front().shape()[0] > 0, ErrorKind::Contract, "readout of an empty graph");
  std::optional<Var<T>> z;
  for (std::uint32_t k = first; k < h.size(); ++k) {
    const std::string name = "readout" + std::to_string(k);
    Var<T> per_node = nn::add_bias(nn::matmul(h[k], p(name + ".w")), p(name + ".b"));
    Var<T> s = nn::sum(per_node, 0);
    z = z ? nn::add(*z, s) : s;
  }
  return *z;
}

template <typename T>
EncoderTrace<T> encode_on_tape(nn::Tape<T>& tape, const EncoderParams<T>& params, const std::vector<Var<T>>& bound,
                               const PreparedGraph<T>& g) {
  require(bound.size() == params.count(), ErrorKind::Contract, "parameters not bound to the tape");
  EncoderTrace<T> trace;
  Embedded<T> x = embed_inputs(tape, params, bound, g);
  trace.h.push_back(x.nodes);
  trace.e.push_back(x.edges);
  for (std::uint32_t k = 1; k <= params.config.layers; ++k) {
    auto [h, e] = message_passing_layer(tape, params, bound, k, trace.h.back(), trace.e.back(), g);
    trace.h.push_back(h);
    trace.e.push_back(e);
  }
  trace.z = readout(params, bound, trace.h);
  return trace;
}

std::vector<float> encode(const features::GraphFeatures& gf, const EncoderParams<float>& params) {
  const PreparedGraph<float> g = prepare<float>(gf, params.config);
  nn::Tape<float> tape(false);
  const auto bound = bind(tape, params);
  const Var<float> z = encode_on_tape(tape, params, bound, g).z;
  return z.value().values();
}

#define CADRET_INSTANTIATE_ENCODER(T)                                                                          \
  template struct EncoderParams<T>;                                                                            \
  template PreparedGraph<T> prepare<T>(const features::GraphFeatures&, const EncoderConfig&);                  \
  template std::vector<Var<T>> bind(nn::Tape<T>&, const EncoderParams<T>&);                                    \
  template Embedded<T> embed_inputs(nn::Tape<T>&, const EncoderParams<T>&, const std::vector<Var<T>>&,         \
                                    const PreparedGraph<T>&);                                                  \
  template std::pair<Var<T>, Var<T>> message_passing_layer(nn::Tape<T>&, const EncoderParams<T>&,              \
                                                           const std::vector<Var<T>>&, std::uint32_t, Var<T>,  \
                                                           Var<T>, const PreparedGraph<T>&);                   \
  template Var<T> readout(const EncoderParams<T>&, const std::vector<Var<T>>&, const std::vector<Var<T>>&);    \
  template EncoderTrace<T> encode_on_tape(nn::Tape<T>&, const EncoderParams<T>&, const std::vector<Var<T>>&,   \
                                          const PreparedGraph<T>&);

CADRET_INSTANTIATE_ENCODER(float)
CADRET_INSTANTIATE_ENCODER(double)

}  // namespace cadret::encoder
