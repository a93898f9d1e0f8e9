#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace medner {

struct TrainLogRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_span_f1 = 0.0;
  double learning_rate = 0.0;

  friend bool operator==(const TrainLogRow&, const TrainLogRow&) = default;
};

using TrainLog = std::vector<TrainLogRow>;

inline constexpr std::string_view kTrainLogHeader = "epoch,train_loss,val_loss,val_span_f1,lr";

/// CSV with kTrainLogHeader, reals at 6 significant digits.
std::string write_trainlog_csv(const TrainLog& log);
TrainLog parse_trainlog_csv(std::string_view text);

}  // namespace medner
