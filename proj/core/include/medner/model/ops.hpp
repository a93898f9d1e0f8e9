#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "medner/model/tensor.hpp"

namespace medner {

/// Attention key mask: nonzero entries are attendable positions.
using KeyMask = std::vector<std::uint8_t>;

/// Numerically stable softmax (max-subtracted). Throws ConfigError on empty input.
template <class T>
std::vector<T> softmax(std::span<const T> z);

/// In-place softmax over the entries of `z` whose mask entry is nonzero;
/// masked entries are set to exactly 0. At least one entry must be unmasked.
template <class T>
void masked_softmax_inplace(std::span<T> z, std::span<const std::uint8_t> mask);

template <class T>
struct AttentionOutput {
  Tensor<T> output;   // [n, d_v]
  Tensor<T> weights;  // [n, n], row-stochastic over unmasked keys
};

/// Scaled dot-product attention softmax(Q K^T / sqrt(d_k) + mask) V for
/// Q, K of shape [n, d_k] and V of shape [n, d_v]. Masked keys receive
/// weight 0. Throws ConfigError on shape mismatch or an all-masked input.
template <class T>
AttentionOutput<T> attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                             std::span<const std::uint8_t> key_mask);

/// GELU with the exact Gaussian CDF.
double gelu(double x);
double gelu_derivative(double x);

inline constexpr double kLayerNormEpsilon = 1e-5;

}  // namespace medner
