#pragma once

#include <cstddef>

#include <nlohmann/json_fwd.hpp>

namespace medner {

/// Encoder hyperparameters; the defaults are the desk-scale configuration.
struct ModelConfig {
  std::size_t vocab_size = 2;
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t n_layers = 2;
  std::size_t d_ff = 128;
  std::size_t max_len = 64;
  std::size_t n_labels = 1;
  double dropout_rate = 0.1;

  std::size_t head_dim() const { return d_model / n_heads; }

  /// Throws ConfigError on zero counts, d_model not divisible by n_heads, or
  /// a dropout rate outside [0, 1).
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace medner
