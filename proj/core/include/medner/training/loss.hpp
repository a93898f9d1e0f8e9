#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "medner/model/tensor.hpp"

namespace medner {

inline constexpr std::int32_t kIgnoreLabel = -1;
inline constexpr double kProbabilityFloor = 1e-12;

template <class T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> dlogits;  // same shape as the logits
  std::size_t active_count = 0;
};

/// Mean categorical cross-entropy over positions whose label is not
/// kIgnoreLabel: -(1/N) * sum log max(softmax(z)[y], 1e-12). The gradient
/// is (softmax(z) - onehot(y)) / N at active positions and 0 elsewhere.
///
/// Throws ConfigError when every position is ignored or a label is out of range.
template <class T>
LossResult<T> cross_entropy(const Tensor<T>& logits, std::span<const std::int32_t> label_ids);

}  // namespace medner
