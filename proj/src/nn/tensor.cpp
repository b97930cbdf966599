#include "cadret/nn/tensor.hpp"

#include <cmath>

#include "cadret/core/error.hpp"

namespace cadret::nn {

std::string to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t numel(const Shape& shape) noexcept {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(std::move(shape)), data_(numel(shape_), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
  require(data_.size() == numel(shape_), ErrorKind::Shape,
          "tensor data length " + std::to_string(data_.size()) + " does not match shape " + to_string(shape_));
}

template <typename T>
std::size_t Tensor<T>::rows() const noexcept {
  return shape_.size() <= 1 ? 1 : shape_[0];
}

template <typename T>
std::size_t Tensor<T>::cols() const noexcept {
  const std::size_t r = rows();
  return r == 0 ? 0 : data_.size() / r;
}

template <typename T>
void Tensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
void Tensor<T>::reshape(Shape shape) {
  require(numel(shape) == data_.size(), ErrorKind::Shape,
          "cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  shape_ = std::move(shape);
}

template <typename T>
bool Tensor<T>::all_finite() const noexcept {
  for (T x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace cadret::nn
