#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cadret/features/features.hpp"
#include "cadret/nn/checkpoint.hpp"
#include "cadret/nn/ops.hpp"

namespace cadret::encoder {

enum class Gate : std::uint8_t {
  Sigmoid = 0,  // f_theta(e) = sigmoid(e)
  Learned = 1,  // f_theta(e) = sigmoid(e W + b)
};

struct EncoderConfig {
  std::uint32_t node_dim = 128;
  std::uint32_t graph_dim = 256;
  std::uint32_t layers = 5;
  // Node sub-embeddings (sum to node_dim) and edge sub-embeddings (sum to the
  // edge dim, which must equal node_dim).
  std::uint32_t node_uv = 64, node_geo = 32, node_product = 32;
  std::uint32_t edge_uv = 96, edge_geo = 32;
  std::vector<std::uint32_t> cnn2d_channels{16, 32};
  std::vector<std::uint32_t> cnn1d_channels{16, 32};
  std::uint32_t kernel = 3;
  std::uint32_t geo_hidden = 32;
  std::uint32_t product_hidden = 32;
  Gate gate = Gate::Sigmoid;
  bool readout_include_input = false;
  // Input contract with the feature extractor.
  features::GridSpec grid;
  std::uint32_t product_width = 11;
  std::uint32_t surface_types = 6;
  std::uint32_t curve_types = 3;

  std::uint32_t edge_dim() const noexcept { return edge_uv + edge_geo; }
  bool operator==(const EncoderConfig&) const = default;
};

// Throws Error(Config) naming the violated invariant.
void validate(const EncoderConfig& cfg);
nlohmann::json config_to_json(const EncoderConfig& cfg);
EncoderConfig config_from_json(const nlohmann::json& j);
// Default plan with the grid and product width taken from a schema.
EncoderConfig default_config(const features::AttrSchema& schema, features::GridSpec grid = {});

// Ordered, named parameter tensors. Order is fixed by the config.
template <typename T>
struct EncoderParams {
  EncoderConfig config;
  std::vector<std::string> names;
  std::vector<nn::Tensor<T>> tensors;

  std::size_t index(const std::string& name) const;
  const nn::Tensor<T>& get(const std::string& name) const { return tensors[index(name)]; }
  std::size_t count() const noexcept { return tensors.size(); }
  std::size_t scalar_count() const noexcept;
};

// Parameter names and shapes implied by a config, in canonical order.
std::vector<std::pair<std::string, nn::Shape>> parameter_layout(const EncoderConfig& cfg);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per tensor; each tensor draws from
// its own stream derived from (seed, name).
EncoderParams<float> init_params(const EncoderConfig& cfg, std::uint64_t seed);

template <typename To, typename From>
EncoderParams<To> cast_params(const EncoderParams<From>& p) {
  EncoderParams<To> out{p.config, p.names, {}};
  for (const auto& t : p.tensors) out.tensors.push_back(nn::cast<To>(t));
  return out;
}

// Checkpoint manifest carries the config under "encoder"; extra keys are kept.
nn::Checkpoint to_checkpoint(const EncoderParams<float>& params, nlohmann::json manifest = nlohmann::json::object());
// Throws Error(Config) if tensors do not match the embedded config.
EncoderParams<float> from_checkpoint(const nn::Checkpoint& ckpt);
std::string parameter_hash(const EncoderParams<float>& params);

// Encoder input in canonical order: nodes sorted by face id, edges by
// (first node, second node, curve id) over the sorted node indices.
template <typename T>
struct PreparedGraph {
  std::string part_id;
  std::vector<std::string> node_ids;
  nn::Tensor<T> uv;                    // [V, gu, gv, 7]
  std::vector<std::uint32_t> surface;  // [V]
  nn::Tensor<T> area;                  // [V, 1]
  nn::Tensor<T> product;               // [V, product_width]
  nn::Tensor<T> curve_grid;            // [E, gt, 6]
  std::vector<std::uint32_t> curve;    // [E]
  nn::Tensor<T> length;                // [E, 1]
  std::vector<std::uint32_t> src, dst; // edge endpoints, src < dst

  std::size_t nodes() const noexcept { return surface.size(); }
  std::size_t edges() const noexcept { return curve.size(); }
};

// Throws Error(Config) when grid dims or product width differ from the
// config, Error(Routing) for a type index outside the parameter banks,
// Error(Contract) for an empty graph.
template <typename T>
PreparedGraph<T> prepare(const features::GraphFeatures& gf, const EncoderConfig& cfg);

// Parameters bound to a tape as leaves, in EncoderParams order.
template <typename T>
std::vector<nn::Var<T>> bind(nn::Tape<T>& tape, const EncoderParams<T>& params);

template <typename T>
struct Embedded {
  nn::Var<T> nodes;  // [V, node_dim]
  nn::Var<T> edges;  // [E, edge_dim]
};

template <typename T>
struct EncoderTrace {
  std::vector<nn::Var<T>> h;  // h[0] = embedded nodes, h[k] after layer k
  std::vector<nn::Var<T>> e;
  nn::Var<T> z;               // [1, graph_dim]
};

template <typename T>
Embedded<T> embed_inputs(nn::Tape<T>& tape, const EncoderParams<T>& params, const std::vector<nn::Var<T>>& bound,
                         const PreparedGraph<T>& g);

template <typename T>
std::pair<nn::Var<T>, nn::Var<T>> message_passing_layer(nn::Tape<T>& tape, const EncoderParams<T>& params,
                                                        const std::vector<nn::Var<T>>& bound, std::uint32_t layer,
                                                        nn::Var<T> h, nn::Var<T> e, const PreparedGraph<T>& g);

// z = sum over layers k (ascending) of the pairwise row sum over nodes of
// (h_k W_k + b_k). `h` holds h_0..h_K; h_0 enters only with
// readout_include_input.
template <typename T>
nn::Var<T> readout(const EncoderParams<T>& params, const std::vector<nn::Var<T>>& bound,
                   const std::vector<nn::Var<T>>& h);

template <typename T>
EncoderTrace<T> encode_on_tape(nn::Tape<T>& tape, const EncoderParams<T>& params, const std::vector<nn::Var<T>>& bound,
                               const PreparedGraph<T>& g);

// Inference: graph embedding z as a flat vector of graph_dim values.
std::vector<float> encode(const features::GraphFeatures& gf, const EncoderParams<float>& params);

}  // namespace cadret::encoder
