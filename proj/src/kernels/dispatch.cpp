#include <cstdlib>
#include <string_view>

#include "cadret/kernels/kernels.hpp"

namespace cadret::kernels {
namespace {

const KernelSet& select() noexcept {
  const char* env = std::getenv("CADRET_SIMD");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar_kernels();
  if (want == "avx2" && avx2_kernels()) return *avx2_kernels();
  if (want == "neon" && neon_kernels()) return *neon_kernels();
  if (const KernelSet* k = avx2_kernels()) return *k;
  if (const KernelSet* k = neon_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const KernelSet& active() noexcept {
  static const KernelSet& chosen = select();
  return chosen;
}

}  // namespace cadret::kernels
