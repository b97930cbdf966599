#pragma once

// Inner-loop arithmetic kernels with a scalar reference implementation and
// SIMD variants (AVX2 on x86-64, NEON on AArch64) selected at runtime.
//
// axpy variants round exactly like the scalar reference (separate multiply
// and add, lane-wise), so they are bitwise interchangeable. dot variants
// accumulate in several lanes and therefore differ from the scalar order in
// the last bits; the selected kernel set is fixed for the process, so results
// are still run-to-run deterministic.

#include <cstddef>
#include <string_view>

namespace cadret::kernels {

struct KernelSet {
  std::string_view name;
  float (*dot_f32)(const float* a, const float* b, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy_f32)(float alpha, const float* x, float* y, std::size_t n);
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul_f32)(const float* a, const float* b, float* out, std::size_t n);
  void (*mul_f64)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelSet& scalar_kernels() noexcept;
// nullptr when the variant is not compiled in or the CPU lacks support.
const KernelSet* avx2_kernels() noexcept;
const KernelSet* neon_kernels() noexcept;

// Chosen once: the best supported variant, unless CADRET_SIMD=scalar|avx2|neon
// requests a specific one.
const KernelSet& active() noexcept;

template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) noexcept;
template <>
inline float dot<float>(const float* a, const float* b, std::size_t n) noexcept {
  return active().dot_f32(a, b, n);
}
template <>
inline double dot<double>(const double* a, const double* b, std::size_t n) noexcept {
  return active().dot_f64(a, b, n);
}

template <typename T>
inline void axpy(T alpha, const T* x, T* y, std::size_t n) noexcept;
template <>
inline void axpy<float>(float alpha, const float* x, float* y, std::size_t n) noexcept {
  active().axpy_f32(alpha, x, y, n);
}
template <>
inline void axpy<double>(double alpha, const double* x, double* y, std::size_t n) noexcept {
  active().axpy_f64(alpha, x, y, n);
}

template <typename T>
inline void mul(const T* a, const T* b, T* out, std::size_t n) noexcept;
template <>
inline void mul<float>(const float* a, const float* b, float* out, std::size_t n) noexcept {
  active().mul_f32(a, b, out, n);
}
template <>
inline void mul<double>(const double* a, const double* b, double* out, std::size_t n) noexcept {
  active().mul_f64(a, b, out, n);
}

}  // namespace cadret::kernels
