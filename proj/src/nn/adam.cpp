#include "cadret/nn/adam.hpp"

#include <cmath>

#include "cadret/core/error.hpp"

namespace cadret::nn {

template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads, AdamState<T>& state) {
  require(params.size() == grads.size(), ErrorKind::Contract, "adam_step: parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const Tensor<T>* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  }
  require(state.m.size() == params.size(), ErrorKind::Contract, "adam_step: state tracks a different parameter set");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i]->shape() == grads[i]->shape() && state.m[i].shape() == params[i]->shape(), ErrorKind::Shape,
            "adam_step: parameter " + std::to_string(i) + " has shape " + to_string(params[i]->shape()) +
                " but gradient/moment shape " + to_string(grads[i]->shape()));
  }
  ++state.step;
  const T c1 = T(1) - std::pow(state.beta1, static_cast<T>(state.step));
  const T c2 = T(1) - std::pow(state.beta2, static_cast<T>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    const Tensor<T>& g = *grads[i];
    Tensor<T>& m = state.m[i];
    Tensor<T>& v = state.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = state.beta1 * m[k] + (T(1) - state.beta1) * g[k];
      v[k] = state.beta2 * v[k] + (T(1) - state.beta2) * g[k] * g[k];
      const T mhat = m[k] / c1;
      const T vhat = v[k] / c2;
      p[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

template void adam_step(const std::vector<Tensor<float>*>&, const std::vector<const Tensor<float>*>&,
                        AdamState<float>&);
template void adam_step(const std::vector<Tensor<double>*>&, const std::vector<const Tensor<double>*>&,
                        AdamState<double>&);

}  // namespace cadret::nn
