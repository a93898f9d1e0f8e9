#include "medner/model/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "medner/error.hpp"

namespace medner {

template <class T>
std::vector<T> softmax(std::span<const T> z) {
  if (z.empty()) throw ConfigError("softmax of an empty vector");
  std::vector<T> out(z.begin(), z.end());
  const KeyMask all(z.size(), 1);
  masked_softmax_inplace<T>(out, all);
  return out;
}

template <class T>
void masked_softmax_inplace(std::span<T> z, std::span<const std::uint8_t> mask) {
  T max = -std::numeric_limits<T>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!mask[i]) continue;
    any = true;
    if (z[i] > max || std::isnan(z[i])) max = z[i];
  }
  if (!any) throw ConfigError("softmax over an all-masked row");
  T sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = mask[i] ? std::exp(z[i] - max) : T(0);
    sum += z[i];
  }
  const T inv = T(1) / sum;
  for (auto& v : z) v *= inv;
}

template <class T>
AttentionOutput<T> attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                             std::span<const std::uint8_t> key_mask) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2) throw ConfigError("attention expects matrices");
  const std::size_t n = q.dim(0);
  const std::size_t dk = q.dim(1);
  const std::size_t dv = v.dim(1);
  if (k.dim(0) != n || v.dim(0) != n || k.dim(1) != dk || key_mask.size() != n) {
    throw ConfigError("attention operand shapes disagree");
  }
  if (std::none_of(key_mask.begin(), key_mask.end(), [](auto m) { return m != 0; })) {
    throw ConfigError("attention with every position masked");
  }
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  AttentionOutput<T> out{Tensor<T>({n, dv}), Tensor<T>({n, n})};
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.weights.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      T s = 0;
      for (std::size_t c = 0; c < dk; ++c) s += q(i, c) * k(j, c);
      row[j] = s * scale;
    }
    masked_softmax_inplace<T>(row, key_mask);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] == T(0)) continue;
      for (std::size_t c = 0; c < dv; ++c) out.output(i, c) += row[j] * v(j, c);
    }
  }
  return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

template std::vector<float> softmax<float>(std::span<const float>);
template std::vector<double> softmax<double>(std::span<const double>);
template void masked_softmax_inplace<float>(std::span<float>, std::span<const std::uint8_t>);
template void masked_softmax_inplace<double>(std::span<double>, std::span<const std::uint8_t>);
template AttentionOutput<float> attention<float>(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&,
                                                 std::span<const std::uint8_t>);
template AttentionOutput<double> attention<double>(const Tensor<double>&, const Tensor<double>&,
                                                   const Tensor<double>&, std::span<const std::uint8_t>);

}  // namespace medner
