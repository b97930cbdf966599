#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "cadret/nn/tensor.hpp"

namespace cadret::nn {

template <typename T>
class Tape;

// Handle to a value recorded on a tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::uint32_t id = 0;

  const Tensor<T>& value() const;
  const Shape& shape() const { return value().shape(); }
};

// Ordered record of executed operations. Nodes are appended in execution
// order, so node ids are a topological order. Confined to one thread.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::uint32_t self)>;

  // With grad disabled nothing requires grad and no backward closures are kept.
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> constant(Tensor<T> value);
  Var<T> variable(Tensor<T> value);
  // Leaf referencing an external tensor without copying; the tensor must
  // outlive the tape and stay unmodified while the tape is in use.
  Var<T> param(const Tensor<T>& value);

  // Records an op output. `backward` runs only if some input requires grad.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward);
  Var<T> record(Tensor<T> value, const std::vector<Var<T>>& inputs, BackwardFn backward);

  const Tensor<T>& value(std::uint32_t id) const;
  const Tensor<T>& value(Var<T> v) const { return value(v.id); }
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  bool requires_grad(Var<T> v) const { return requires_grad(v.id); }
  bool grad_enabled() const noexcept { return grad_enabled_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Gradient accumulated by the last backward pass (zeros if none reached it).
  Tensor<T> grad(Var<T> v) const;
  // Accumulation buffer for backward closures; allocated as zeros on first use.
  Tensor<T>& grad_buffer(std::uint32_t id);
  const Tensor<T>* grad_if_any(std::uint32_t id) const;

  // Clears all gradients and propagates `seed` from `output` back to the leaves.
  void run_backward(Var<T> output, const Tensor<T>& seed);

  void check_owner(Var<T> v) const;

 private:
  struct Node {
    Tensor<T> own;
    const Tensor<T>* external = nullptr;
    Tensor<T> grad;
    bool grad_allocated = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  bool grad_enabled_;
  std::deque<Node> nodes_;  // stable element addresses: value references survive appends
};

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return tape->value(id);
}

// Reverse pass from a scalar loss (seed 1). Throws Error(Contract) if `loss`
// has more than one element.
template <typename T>
void backward(Tape<T>& tape, Var<T> loss);

// Reverse pass from an arbitrary output with an explicit upstream gradient.
template <typename T>
void backward_from(Tape<T>& tape, Var<T> output, const Tensor<T>& seed);

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace cadret::nn
