#pragma once

#include <cstdint>
#include <optional>

#include "medner/model/parameters.hpp"

namespace medner {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// When set, gradients are rescaled so their global L2 norm is at most this.
  std::optional<double> grad_clip_norm;
};

template <class T>
struct AdamState {
  Parameters<T> m;
  Parameters<T> v;
  std::uint64_t step = 0;

  static AdamState zeros_like(const Parameters<T>& params) {
    return {Parameters<T>::zeros_like(params), Parameters<T>::zeros_like(params), 0};
  }
};

/// One bias-corrected Adam update, in place. Tensors for which
/// is_trainable() is false are left untouched. A non-finite gradient aborts
/// the step before anything changes and throws NumericalError naming the
/// tensor.
template <class T>
void adam_step(Parameters<T>& params, const Parameters<T>& grads, AdamState<T>& state, double lr,
               const AdamOptions& options = {});

/// Global L2 norm over every trainable gradient tensor.
template <class T>
double gradient_norm(const Parameters<T>& grads);

}  // namespace medner
