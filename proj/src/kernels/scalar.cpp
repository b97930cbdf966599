#include "cadret/kernels/kernels.hpp"

namespace cadret::kernels {
namespace {

template <typename T>
T dot_scalar(const T* a, const T* b, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy_scalar(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void mul_scalar(const T* a, const T* b, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

const KernelSet& scalar_kernels() noexcept {
  static const KernelSet set{
      "scalar",
      &dot_scalar<float>,
      &dot_scalar<double>,
      &axpy_scalar<float>,
      &axpy_scalar<double>,
      &mul_scalar<float>,
      &mul_scalar<double>,
  };
  return set;
}

}  // namespace cadret::kernels
