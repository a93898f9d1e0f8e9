#pragma once

#include <cstddef>
#include <span>

#include "medner/training/train_log.hpp"

namespace medner {

struct DecayConfig {
  double factor = 0.5;
  std::size_t patience = 3;
  double min_lr = 1e-7;
  /// An epoch improves only if it beats the best earlier loss by more than this.
  double threshold = 1e-6;
};

/// Reduce-on-plateau over the history's monitored loss (val_loss).
///
/// The history is replayed from the first row: every epoch that does not
/// beat the best earlier loss by more than `threshold` increments a
/// counter (the first epoch has nothing to beat, so it counts too); an
/// improving epoch clears it. When the counter reaches `patience` a
/// reduction fires and the counter restarts. Returns
/// max(current_lr * factor, min_lr) if the last row fires, else current_lr.
double lr_schedule(std::span<const TrainLogRow> history, double current_lr, const DecayConfig& decay);

}  // namespace medner
