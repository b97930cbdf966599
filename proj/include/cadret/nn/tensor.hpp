#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cadret::nn {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t numel(const Shape& shape) noexcept;

// Dense row-major array. data.size() == numel(shape) always.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> data);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const noexcept { return shape_[i]; }
  std::size_t size() const noexcept { return data_.size(); }
  // Leading dimension and the product of the rest; a rank-1 tensor is one row.
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> span() noexcept { return data_; }
  std::span<const T> span() const noexcept { return data_; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  T& at(std::size_t r, std::size_t c) noexcept { return data_[r * cols() + c]; }
  const T& at(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }
  const std::vector<T>& values() const noexcept { return data_; }

  void fill(T value);
  // Reinterprets the data under a new shape with the same element count.
  void reshape(Shape shape);
  bool all_finite() const noexcept;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename To, typename From>
Tensor<To> cast(const Tensor<From>& t) {
  std::vector<To> data(t.values().begin(), t.values().end());
  return Tensor<To>(t.shape(), std::move(data));
}

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace cadret::nn
