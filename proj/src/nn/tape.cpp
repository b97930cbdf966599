#include "cadret/nn/tape.hpp"

#include "cadret/core/error.hpp"
#include "cadret/kernels/kernels.hpp"

namespace cadret::nn {

template <typename T>
Var<T> Tape<T>::constant(Tensor<T> value) {
  Node n;
  n.own = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var<T> Tape<T>::variable(Tensor<T> value) {
  Var<T> v = constant(std::move(value));
  nodes_.back().requires_grad = grad_enabled_;
  return v;
}

template <typename T>
Var<T> Tape<T>::param(const Tensor<T>& value) {
  Node n;
  n.external = &value;
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward) {
  Node n;
  n.own = std::move(value);
  for (const Var<T>& in : inputs) {
    check_owner(in);
    n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, const std::vector<Var<T>>& inputs, BackwardFn backward) {
  Node n;
  n.own = std::move(value);
  for (const Var<T>& in : inputs) {
    check_owner(in);
    n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename T>
const Tensor<T>& Tape<T>::value(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.own;
}

template <typename T>
Tensor<T> Tape<T>::grad(Var<T> v) const {
  check_owner(v);
  const Node& n = nodes_[v.id];
  return n.grad_allocated ? n.grad : Tensor<T>(value(v.id).shape());
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(std::uint32_t id) {
  Node& n = nodes_[id];
  if (!n.grad_allocated) {
    n.grad = Tensor<T>(value(id).shape());
    n.grad_allocated = true;
  }
  return n.grad;
}

template <typename T>
const Tensor<T>* Tape<T>::grad_if_any(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.grad_allocated ? &n.grad : nullptr;
}

template <typename T>
void Tape<T>::check_owner(Var<T> v) const {
  require(v.tape == this && v.id < nodes_.size(), ErrorKind::Contract, "variable does not belong to this tape");
}

template <typename T>
void Tape<T>::run_backward(Var<T> output, const Tensor<T>& seed) {
  check_owner(output);
  require(seed.shape() == value(output.id).shape(), ErrorKind::Shape,
          "backward seed shape " + to_string(seed.shape()) + " does not match output shape " +
              to_string(value(output.id).shape()));
  for (Node& n : nodes_) {
    n.grad = Tensor<T>();
    n.grad_allocated = false;
  }
  if (!nodes_[output.id].requires_grad) return;
  Tensor<T>& g = grad_buffer(output.id);
  kernels::axpy<T>(T(1), seed.data(), g.data(), g.size());
  for (std::uint32_t id = output.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.grad_allocated && n.backward) n.backward(*this, id);
  }
}

template <typename T>
void backward(Tape<T>& tape, Var<T> loss) {
  tape.check_owner(loss);
  const Tensor<T>& v = tape.value(loss.id);
  require(v.size() == 1, ErrorKind::Contract,
          "backward needs a scalar loss, got shape " + to_string(v.shape()));
  tape.run_backward(loss, Tensor<T>(v.shape(), T(1)));
}

template <typename T>
void backward_from(Tape<T>& tape, Var<T> output, const Tensor<T>& seed) {
  tape.run_backward(output, seed);
}

template class Tape<float>;
template class Tape<double>;
template void backward(Tape<float>&, Var<float>);
template void backward(Tape<double>&, Var<double>);
template void backward_from(Tape<float>&, Var<float>, const Tensor<float>&);
template void backward_from(Tape<double>&, Var<double>, const Tensor<double>&);

}  // namespace cadret::nn
