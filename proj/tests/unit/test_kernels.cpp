#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "cadret/kernels/kernels.hpp"
#include "support/generators.hpp"

using namespace cadret;

namespace {

std::vector<const kernels::KernelSet*> simd_variants() {
  std::vector<const kernels::KernelSet*> out;
  if (auto* k = kernels::avx2_kernels()) out.push_back(k);
  if (auto* k = kernels::neon_kernels()) out.push_back(k);
  return out;
}

// Oracle: extended-precision dot and the magnitude sum bounding its rounding error.
template <typename T>
std::pair<long double, long double> dot_oracle(const std::vector<T>& a, const std::vector<T>& b) {
  long double s = 0, m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<long double>(a[i]) * b[i];
    m += std::fabs(static_cast<long double>(a[i]) * b[i]);
  }
  return {s, m};
}

template <typename T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar dot agrees with an extended-precision oracle") {
    Rng rng(1);
    for (std::size_t n : {0u, 1u, 7u, 64u, 1000u}) {
      auto a = testing::random_vector(rng, n), b = testing::random_vector(rng, n);
      auto [ref, mag] = dot_oracle(a, b);
      const double got = kernels::scalar_kernels().dot_f64(a.data(), b.data(), n);
      CHECK(std::fabs(got - static_cast<double>(ref)) <= (n + 1) * 1.2e-16 * static_cast<double>(mag) + 1e-300);
    }
  }

  TEST_CASE("simd axpy and mul are bitwise equal to scalar for every length") {
    const auto variants = simd_variants();
    if (variants.empty()) MESSAGE("no SIMD variant available on this CPU; scalar only");
    const auto& ref = kernels::scalar_kernels();
    for (const kernels::KernelSet* k : variants) {
      CAPTURE(k->name);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t n = rng.index(70);
        CAPTURE(n);
        auto x = testing::random_floats(rng, n), y = testing::random_floats(rng, n);
        auto y_ref = y, y_simd = y;
        const auto alpha = static_cast<float>(rng.uniform(-2, 2));
        ref.axpy_f32(alpha, x.data(), y_ref.data(), n);
        k->axpy_f32(alpha, x.data(), y_simd.data(), n);
        CHECK(bitwise_equal(y_ref, y_simd));

        std::vector<float> m_ref(n), m_simd(n);
        ref.mul_f32(x.data(), y.data(), m_ref.data(), n);
        k->mul_f32(x.data(), y.data(), m_simd.data(), n);
        CHECK(bitwise_equal(m_ref, m_simd));

        auto xd = testing::random_vector(rng, n), yd = testing::random_vector(rng, n);
        auto yd_ref = yd, yd_simd = yd;
        ref.axpy_f64(0.75, xd.data(), yd_ref.data(), n);
        k->axpy_f64(0.75, xd.data(), yd_simd.data(), n);
        CHECK(bitwise_equal(yd_ref, yd_simd));

        std::vector<double> md_ref(n), md_simd(n);
        ref.mul_f64(xd.data(), yd.data(), md_ref.data(), n);
        k->mul_f64(xd.data(), yd.data(), md_simd.data(), n);
        CHECK(bitwise_equal(md_ref, md_simd));
      }
    }
  }

  TEST_CASE("simd dot matches scalar within the summation error bound") {
    const auto& ref = kernels::scalar_kernels();
    for (const kernels::KernelSet* k : simd_variants()) {
      CAPTURE(k->name);
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(100 + seed);
        const std::size_t n = rng.index(300);
        CAPTURE(n);
        auto a = testing::random_floats(rng, n), b = testing::random_floats(rng, n);
        auto [exact, mag] = dot_oracle(a, b);
        const double bound = 2.0 * (n + 1) * std::numeric_limits<float>::epsilon() * static_cast<double>(mag);
        CHECK(std::fabs(ref.dot_f32(a.data(), b.data(), n) - k->dot_f32(a.data(), b.data(), n)) <= bound + 1e-30);
        CHECK(std::fabs(k->dot_f32(a.data(), b.data(), n) - static_cast<double>(exact)) <= bound + 1e-30);

        auto ad = testing::random_vector(rng, n), bd = testing::random_vector(rng, n);
        auto [exact_d, mag_d] = dot_oracle(ad, bd);
        const double bound_d = 2.0 * (n + 1) * std::numeric_limits<double>::epsilon() * static_cast<double>(mag_d);
        CHECK(std::fabs(k->dot_f64(ad.data(), bd.data(), n) - static_cast<double>(exact_d)) <= bound_d + 1e-300);
      }
    }
  }

  TEST_CASE("active kernel set is stable across calls") {
    CHECK(&kernels::active() == &kernels::active());
    CHECK(!kernels::active().name.empty());
  }
}
