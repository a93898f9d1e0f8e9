#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "medner/model/config.hpp"
#include "medner/model/ops.hpp"
#include "medner/model/parameters.hpp"
#include "medner/model/tensor.hpp"

namespace medner {

/// Padded token ids with a per-position validity mask, both [batch, length].
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<std::int32_t> token_ids;
  KeyMask mask;

  /// Right-pads each sequence with id 0 to the longest one.
  static TokenBatch from_sequences(std::span<const std::vector<std::int32_t>> sequences);
};

struct DropoutOptions {
  bool enabled = false;
  std::uint64_t seed = 0;
};

/// Activations of one encoder layer for one record; all [T, *] row-major.
template <class T>
struct LayerTrace {
  Tensor<T> input;
  Tensor<T> ln1_hat;
  std::vector<T> ln1_rstd;
  Tensor<T> ln1_out;
  Tensor<T> q, k, v;
  Tensor<T> probs;        // [heads, T, T] before dropout
  Tensor<T> probs_scale;  // dropout multipliers, empty when dropout is off
  Tensor<T> context;      // concatenated head outputs
  Tensor<T> mid;          // input + attention block output
  Tensor<T> ln2_hat;
  std::vector<T> ln2_rstd;
  Tensor<T> ln2_out;
  Tensor<T> ff_pre;
  Tensor<T> ff_act;       // GELU output after dropout
  Tensor<T> ff_scale;     // dropout multipliers, empty when dropout is off
};

template <class T>
struct RecordTrace {
  std::vector<std::int32_t> token_ids;
  KeyMask mask;
  std::vector<LayerTrace<T>> layers;
  Tensor<T> output;  // final hidden states fed to the head
};

template <class T>
struct ForwardTrace {
  ModelConfig config;
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<RecordTrace<T>> records;
  /// [batch * length]; 1 marks a padded position whose logits are meaningless.
  KeyMask padded;
};

template <class T>
struct ForwardResult {
  Tensor<T> logits;  // [batch, length, n_labels]
  ForwardTrace<T> trace;
};

/// Pre-norm transformer encoder with a per-token linear head.
///
/// Each layer computes x + MHA(LN1(x)) followed by x + FF(LN2(x)); records
/// never attend across the batch, and padded keys are masked out. Throws
/// ConfigError for out-of-range ids or sequences longer than max_len.
template <class T>
ForwardResult<T> forward(const Parameters<T>& params, const ModelConfig& config, const TokenBatch& batch,
                         const DropoutOptions& dropout = {});

/// Argmax over the last axis; ties go to the lowest label id.
template <class T>
std::vector<std::int32_t> predict_labels(const Tensor<T>& logits);

}  // namespace medner
