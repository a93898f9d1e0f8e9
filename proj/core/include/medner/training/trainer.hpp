#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "medner/corpus/vocab.hpp"
#include "medner/model/checkpoint.hpp"
#include "medner/model/config.hpp"
#include "medner/model/parameters.hpp"
#include "medner/training/schedule.hpp"
#include "medner/training/train_log.hpp"

namespace medner {

struct TrainConfig {
  double learning_rate = 2e-5;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 10;
  DecayConfig decay;
  std::uint64_t seed = 0;
  std::optional<double> grad_clip_norm;
  std::optional<std::size_t> early_stop_patience;

  void validate() const;
};

struct TrainData {
  std::vector<EncodedRecord> train;
  std::vector<EncodedRecord> val;
  LabelIndex labels;
  Vocabulary vocab;
};

struct TrainHooks {
  /// When set, final.ckpt, best.ckpt and trainlog.csv are written here.
  std::optional<std::filesystem::path> output_dir;
  std::function<void(const TrainLogRow&)> on_epoch;
  std::function<void(const std::string&)> on_warning;
};

template <class T>
struct TrainResult {
  Parameters<T> final_params;
  Parameters<T> best_params;
  std::size_t best_epoch = 0;
  TrainLog log;
  CheckpointMeta meta;
};

/// Token-weighted mean cross-entropy and span micro-F1 (no dropout).
struct ValidationScore {
  double loss = 0.0;
  double span_f1 = 0.0;
};

template <class T>
ValidationScore score_records(const Parameters<T>& params, const ModelConfig& config,
                                 const std::vector<EncodedRecord>& records, const LabelIndex& labels);

/// Runs the epoch loop: shuffle, batch, forward, cross-entropy, backward,
/// Adam; then validation, logging and the plateau schedule. The best
/// parameters are those with the highest validation span F1 (earliest
/// epoch on ties). With an empty validation split, scheduling and
/// selection use the training loss instead and a warning is emitted.
///
/// Throws NumericalError on a non-finite loss after writing the last good
/// parameters to final.ckpt (when an output directory is set).
template <class T>
TrainResult<T> train(const TrainData& data, const ModelConfig& config, const TrainConfig& train_config,
                     const TrainHooks& hooks = {});

}  // namespace medner
