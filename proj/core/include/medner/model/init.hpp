#pragma once

#include <cstdint>

#include "medner/model/config.hpp"
#include "medner/model/parameters.hpp"

namespace medner {

/// Xavier-uniform weights, zero biases, unit layer-norm gains and fixed
/// sinusoidal positions. Deterministic in (config, seed).
template <class T>
Parameters<T> init_params(const ModelConfig& config, std::uint64_t seed);

/// pos[p][2i] = sin(p / 10000^(2i/d)), pos[p][2i+1] = cos(same).
template <class T>
Tensor<T> sinusoidal_positions(std::size_t max_len, std::size_t d_model);

}  // namespace medner
