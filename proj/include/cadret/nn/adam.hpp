#pragma once

#include <cstdint>
#include <vector>

#include "cadret/nn/tensor.hpp"

namespace cadret::nn {

template <typename T>
struct AdamState {
  T lr = T(0.001);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
  std::uint64_t step = 0;
  std::vector<Tensor<T>> m;  // first moments, one per parameter
  std::vector<Tensor<T>> v;  // second moments
};

// One bias-corrected Adam update of every parameter in place. Moments are
// created on the first step; shapes must match the parameters afterwards.
template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads, AdamState<T>& state);

}  // namespace cadret::nn
