#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cadret/nn/tensor.hpp"

namespace cadret::nn {

inline constexpr std::uint8_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor<float> value;
};

struct Checkpoint {
  nlohmann::json manifest;
  std::vector<NamedTensor> tensors;
};

// Layout: "CRCK", version byte, manifest JSON (length-prefixed), record count,
// records (name, rank, dims, f32 little-endian data), then the SHA-256 of
// everything before it as 64 hex characters.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
// Throws Error(Format) on bad magic, version, truncation or hash mismatch.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// SHA-256 over the ordered records only (names, shapes, data); independent of
// the manifest.
std::string parameter_hash(const std::vector<NamedTensor>& tensors);

}  // namespace cadret::nn
