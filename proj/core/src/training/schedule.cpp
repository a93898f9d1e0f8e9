#include "medner/training/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medner/error.hpp"

namespace medner {

double lr_schedule(std::span<const TrainLogRow> history, double current_lr, const DecayConfig& decay) {
  if (history.empty()) throw ConfigError("lr_schedule needs at least one epoch of history");
  double best = std::numeric_limits<double>::quiet_NaN();
  std::size_t stale = 0;
  bool fire = false;
  for (const auto& row : history) {
    fire = false;
    const bool improved = !std::isnan(best) && row.val_loss < best - decay.threshold;
    if (std::isnan(best) || row.val_loss < best) best = row.val_loss;
    if (improved) {
      stale = 0;
      continue;
    }
    if (++stale >= decay.patience) {
      fire = true;
      stale = 0;
    }
  }
  return fire ? std::max(current_lr * decay.factor, decay.min_lr) : current_lr;
}

}  // namespace medner
