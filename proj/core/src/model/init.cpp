#include "medner/model/init.hpp"

#include <cmath>

#include "medner/rng.hpp"

namespace medner {

namespace {

bool ends_with(const std::string& s, std::string_view suffix) { return s.ends_with(suffix); }

}  // namespace

template <class T>
Tensor<T> sinusoidal_positions(std::size_t max_len, std::size_t d_model) {
  Tensor<T> pos({max_len, d_model});
  for (std::size_t p = 0; p < max_len; ++p) {
    for (std::size_t i = 0; i < d_model; ++i) {
      const double pair = static_cast<double>(i - i % 2);
      const double angle = static_cast<double>(p) / std::pow(10000.0, pair / static_cast<double>(d_model));
      pos(p, i) = static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pos;
}

template <class T>
Parameters<T> init_params(const ModelConfig& config, std::uint64_t seed) {
  auto params = Parameters<T>::zeros(config);
  Rng rng(seed);
  for (auto& [name, t] : params.entries()) {
    if (name == "emb.pos") {
      t = sinusoidal_positions<T>(config.max_len, config.d_model);
    } else if (ends_with(name, ".g")) {
      t.fill(T(1));
    } else if (t.rank() == 2) {
      const double limit = std::sqrt(6.0 / static_cast<double>(t.dim(0) + t.dim(1)));
      for (auto& v : t.values) v = static_cast<T>((2.0 * rng.uniform() - 1.0) * limit);
    }
    // Remaining rank-1 tensors are biases and stay zero.
  }
  return params;
}

template Tensor<float> sinusoidal_positions<float>(std::size_t, std::size_t);
template Tensor<double> sinusoidal_positions<double>(std::size_t, std::size_t);
template Parameters<float> init_params<float>(const ModelConfig&, std::uint64_t);
template Parameters<double> init_params<double>(const ModelConfig&, std::uint64_t);

}  // namespace medner
