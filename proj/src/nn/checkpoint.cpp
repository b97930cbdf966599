#include "cadret/nn/checkpoint.hpp"

#include "cadret/core/binary_io.hpp"
#include "cadret/core/error.hpp"
#include "cadret/core/hash.hpp"

namespace cadret::nn {

namespace {

constexpr std::string_view kMagic = "CRCK";
constexpr std::size_t kHashChars = 64;

void write_records(ByteWriter& w, const std::vector<NamedTensor>& tensors) {
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const NamedTensor& t : tensors) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.value.rank()));
    for (std::size_t d : t.value.shape()) w.u32(static_cast<std::uint32_t>(d));
    w.f32s(t.value.span());
  }
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kCheckpointVersion);
  w.str(ckpt.manifest.dump());
  write_records(w, ckpt.tensors);
  const std::string digest = sha256_hex(std::span<const std::uint8_t>(w.bytes()));
  w.raw(digest);
  return std::move(w).take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  require(bytes.size() > kMagic.size() + 1 + kHashChars, ErrorKind::Format, "checkpoint too short");
  const auto body = bytes.first(bytes.size() - kHashChars);
  const std::string stored(bytes.end() - kHashChars, bytes.end());
  ByteReader r(body);
  require(r.raw(kMagic.size()) == kMagic, ErrorKind::Format, "not a checkpoint (bad magic)");
  const std::uint8_t version = r.u8();
  require(version == kCheckpointVersion, ErrorKind::Format, "unsupported checkpoint version " + std::to_string(version));
  require(sha256_hex(body) == stored, ErrorKind::Format, "checkpoint content hash mismatch");
  Checkpoint ckpt;
  ckpt.manifest = nlohmann::json::parse(r.str(), nullptr, false);
  require(!ckpt.manifest.is_discarded(), ErrorKind::Format, "checkpoint manifest is not valid JSON");
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.str();
    const std::uint32_t rank = r.u32();
    require(rank <= 8, ErrorKind::Format, "checkpoint tensor '" + t.name + "' has implausible rank");
    Shape shape(rank);
    for (std::size_t& d : shape) d = r.u32();
    require(numel(shape) * 4 <= r.remaining(), ErrorKind::Format, "checkpoint tensor '" + t.name + "' is truncated");
    Tensor<float> value(shape);
    r.f32s(value.span());
    t.value = std::move(value);
    ckpt.tensors.push_back(std::move(t));
  }
  require(r.done(), ErrorKind::Format, "checkpoint has trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::string parameter_hash(const std::vector<NamedTensor>& tensors) {
  ByteWriter w;
  write_records(w, tensors);
  return sha256_hex(std::span<const std::uint8_t>(w.bytes()));
}

}  // namespace cadret::nn
