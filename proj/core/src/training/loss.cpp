#include "medner/training/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "medner/error.hpp"

namespace medner {

template <class T>
LossResult<T> cross_entropy(const Tensor<T>& logits, std::span<const std::int32_t> label_ids) {
  if (logits.rank() == 0 || logits.shape.back() == 0) throw ConfigError("cross_entropy needs a label axis");
  const std::size_t K = logits.shape.back();
  const std::size_t rows = logits.size() / K;
  if (label_ids.size() != rows) throw ConfigError("cross_entropy label count does not match logits");

  LossResult<T> out;
  for (auto y : label_ids) {
    if (y == kIgnoreLabel) continue;
    if (y < 0 || static_cast<std::size_t>(y) >= K) {
      throw ConfigError("label id " + std::to_string(y) + " outside [0, " + std::to_string(K) + ")");
    }
    ++out.active_count;
  }
  if (out.active_count == 0) throw ConfigError("cross_entropy with every position ignored");

  out.dlogits = Tensor<T>(logits.shape);
  const double inv_n = 1.0 / static_cast<double>(out.active_count);
  std::vector<double> p(K);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto y = label_ids[r];
    if (y == kIgnoreLabel) continue;
    const T* z = logits.data() + r * K;
    double max = z[0];
    for (std::size_t k = 1; k < K; ++k) max = std::max(max, static_cast<double>(z[k]));
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      p[k] = std::exp(static_cast<double>(z[k]) - max);
      sum += p[k];
    }
    for (auto& v : p) v /= sum;
    total -= std::log(std::max(p[static_cast<std::size_t>(y)], kProbabilityFloor));
    T* g = out.dlogits.data() + r * K;
    for (std::size_t k = 0; k < K; ++k) {
      const double onehot = static_cast<std::size_t>(y) == k ? 1.0 : 0.0;
      g[k] = static_cast<T>((p[k] - onehot) * inv_n);
    }
  }
  out.loss = total * inv_n;
  return out;
}

template LossResult<float> cross_entropy<float>(const Tensor<float>&, std::span<const std::int32_t>);
template LossResult<double> cross_entropy<double>(const Tensor<double>&, std::span<const std::int32_t>);

}  // namespace medner
