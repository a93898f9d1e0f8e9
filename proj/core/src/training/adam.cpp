#include "medner/training/adam.hpp"

#include <cmath>

#include "medner/error.hpp"

namespace medner {

template <class T>
double gradient_norm(const Parameters<T>& grads) {
  double sq = 0.0;
  for (const auto& [name, g] : grads.entries()) {
    if (!is_trainable(name)) continue;
    for (T v : g.values) sq += static_cast<double>(v) * static_cast<double>(v);
  }
  return std::sqrt(sq);
}

template <class T>
void adam_step(Parameters<T>& params, const Parameters<T>& grads, AdamState<T>& state, double lr,
               const AdamOptions& options) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  auto& entries = params.entries();
  if (grads.tensor_count() != entries.size() || state.m.tensor_count() != entries.size() ||
      state.v.tensor_count() != entries.size()) {
    throw ConfigError("adam_step: gradient or state tensors do not mirror the parameters");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [name, p] = entries[i];
    const auto& g = grads.entries()[i];
    if (g.first != name || g.second.shape != p.shape || state.m.entries()[i].second.shape != p.shape ||
        state.v.entries()[i].second.shape != p.shape) {
      throw ConfigError("adam_step: shape mismatch at '" + name + "'");
    }
    if (!is_trainable(name)) continue;
    for (T v : g.second.values) {
      if (!std::isfinite(static_cast<double>(v))) throw NumericalError("non-finite gradient in '" + name + "'", name);
    }
  }

  double clip = 1.0;
  if (options.grad_clip_norm) {
    const double norm = gradient_norm(grads);
    if (norm > *options.grad_clip_norm && norm > 0.0) clip = *options.grad_clip_norm / norm;
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!is_trainable(entries[i].first)) continue;
    auto& p = entries[i].second.values;
    const auto& g = grads.entries()[i].second.values;
    auto& m = state.m.entries()[i].second.values;
    auto& v = state.v.entries()[i].second.values;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = static_cast<double>(g[k]) * clip;
      const double mk = options.beta1 * m[k] + (1.0 - options.beta1) * gk;
      const double vk = options.beta2 * v[k] + (1.0 - options.beta2) * gk * gk;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double m_hat = mk / c1;
      const double v_hat = vk / c2;
      p[k] = static_cast<T>(p[k] - lr * m_hat / (std::sqrt(v_hat) + options.epsilon));
    }
  }
}

template double gradient_norm<float>(const Parameters<float>&);
template double gradient_norm<double>(const Parameters<double>&);
template void adam_step<float>(Parameters<float>&, const Parameters<float>&, AdamState<float>&, double,
                               const AdamOptions&);
template void adam_step<double>(Parameters<double>&, const Parameters<double>&, AdamState<double>&, double,
                                const AdamOptions&);

}  // namespace medner
