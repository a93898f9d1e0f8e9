#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace medner {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_volume(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

/// Dense row-major array.
template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> values;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), values(shape_volume(shape), fill) {}

  std::size_t size() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }

  T* data() { return values.data(); }
  const T* data() const { return values.data(); }

  /// Row `i` of a tensor viewed as [dim(0), size/dim(0)].
  std::span<T> row(std::size_t i) {
    const std::size_t w = values.size() / shape.front();
    return {values.data() + i * w, w};
  }
  std::span<const T> row(std::size_t i) const {
    const std::size_t w = values.size() / shape.front();
    return {values.data() + i * w, w};
  }

  T& operator()(std::size_t i, std::size_t j) { return values[i * shape[1] + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return values[i * shape[1] + j]; }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return values[(i * shape[1] + j) * shape[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values[(i * shape[1] + j) * shape[2] + k];
  }

  void fill(T v) { std::fill(values.begin(), values.end(), v); }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace medner
