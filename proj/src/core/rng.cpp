#include "cadret/core/rng.hpp"

namespace cadret {

std::uint64_t Rng::index(std::uint64_t n) {
  // Largest multiple of n that fits; draws above it are rejected.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

}  // namespace cadret
