#pragma once

#include "medner/model/config.hpp"
#include "medner/model/encoder.hpp"
#include "medner/model/parameters.hpp"

namespace medner {

/// Reverse-mode gradients of a scalar loss through `forward`.
///
/// `dlogits` is dL/dlogits with the shape of the forward logits; the result
/// mirrors `params` name for name. Gradients are accumulated record by
/// record in batch order. Throws ConfigError if the trace does not belong
/// to `params`/`config`.
template <class T>
Parameters<T> backward(const Parameters<T>& params, const ModelConfig& config, const ForwardTrace<T>& trace,
                       const Tensor<T>& dlogits);

}  // namespace medner
