#include "medner/training/trainer.hpp"

#include <cmath>
#include <limits>

#include "medner/corpus/bio.hpp"
#include "medner/error.hpp"
#include "medner/eval/metrics.hpp"
#include "medner/model/encoder.hpp"
#include "medner/model/init.hpp"
#include "medner/rng.hpp"
#include "medner/training/adam.hpp"
#include "medner/training/backward.hpp"
#include "medner/training/batching.hpp"
#include "medner/training/loss.hpp"
#include "medner/util/atomic_file.hpp"

namespace medner {

namespace {

constexpr std::size_t kScoreBatch = 64;
constexpr std::uint64_t kDropoutStream = 0xD50;

template <class T>
void write_outputs(const std::filesystem::path& dir, const Parameters<T>& final_params, const Parameters<T>& best,
                   const CheckpointMeta& meta, const TrainLog& log) {
  save_checkpoint(dir / "final.ckpt", final_params, meta);
  save_checkpoint(dir / "best.ckpt", best, meta);
  write_file_atomic(dir / "trainlog.csv", write_trainlog_csv(log));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (!(decay.factor > 0.0 && decay.factor < 1.0)) throw ConfigError("decay factor must lie in (0, 1)");
  if (decay.patience < 1) throw ConfigError("decay patience must be at least 1");
  if (!(decay.min_lr >= 0.0)) throw ConfigError("min_lr must be non-negative");
  if (grad_clip_norm && !(*grad_clip_norm > 0.0)) throw ConfigError("grad_clip_norm must be positive");
  if (early_stop_patience && *early_stop_patience < 1) throw ConfigError("early_stop_patience must be at least 1");
}

template <class T>
ValidationScore score_records(const Parameters<T>& params, const ModelConfig& config,
                              const std::vector<EncodedRecord>& records, const LabelIndex& labels) {
  ValidationScore score;
  if (records.empty()) return score;
  const auto batches = make_batches(records, kScoreBatch, 0, false);
  double loss_sum = 0.0;
  std::size_t tokens = 0;
  LabelSequences pred;
  LabelSequences gold;
  for (const auto& b : batches) {
    const auto result = forward(params, config, b.inputs);
    const auto loss = cross_entropy(result.logits, b.label_ids);
    loss_sum += loss.loss * static_cast<double>(loss.active_count);
    tokens += loss.active_count;
    const auto ids = predict_labels(result.logits);
    for (std::size_t i = 0; i < b.record_indices.size(); ++i) {
      const auto& rec = records[b.record_indices[i]];
      auto& p = pred.emplace_back();
      auto& g = gold.emplace_back();
      for (std::size_t t = 0; t < rec.label_ids.size(); ++t) {
        p.push_back(labels.label(ids[i * b.inputs.length + t]));
        g.push_back(labels.label(rec.label_ids[t]));
      }
    }
  }
  score.loss = loss_sum / static_cast<double>(tokens);
  score.span_f1 = span_metrics(pred, gold).micro.f1();
  return score;
}

template <class T>
TrainResult<T> train(const TrainData& data, const ModelConfig& config, const TrainConfig& tc,
                     const TrainHooks& hooks) {
  config.validate();
  tc.validate();
  if (data.train.empty()) throw ConfigError("training split is empty");
  if (config.n_labels != data.labels.size()) {
    throw ConfigError("model n_labels (" + std::to_string(config.n_labels) + ") differs from the label inventory (" +
                      std::to_string(data.labels.size()) + ")");
  }
  if (config.vocab_size != data.vocab.size()) {
    throw ConfigError("model vocab_size (" + std::to_string(config.vocab_size) + ") differs from the vocabulary (" +
                      std::to_string(data.vocab.size()) + ")");
  }
  for (const auto* split : {&data.train, &data.val}) {
    for (const auto& r : *split) {
      if (r.token_ids.size() > config.max_len) {
        throw ConfigError("record '" + r.record_id + "' is longer than max_len " + std::to_string(config.max_len));
      }
    }
  }
  auto warn = [&](const std::string& msg) {
    if (hooks.on_warning) hooks.on_warning(msg);
  };
  const bool has_val = !data.val.empty();
  if (!has_val) warn("validation split is empty; scheduling and best-model selection use the training loss");

  TrainResult<T> result;
  result.meta = {config, tc.seed, data.labels.tags(),
                 std::vector<std::string>(data.vocab.tokens().begin(), data.vocab.tokens().end())};
  Parameters<T> params = init_params<T>(config, tc.seed);
  AdamState<T> state = AdamState<T>::zeros_like(params);
  const AdamOptions adam{.grad_clip_norm = tc.grad_clip_norm};

  Parameters<T> last_good = params;
  result.best_params = params;
  double best_f1 = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;
  TrainLog monitor;
  double lr = tc.learning_rate;
  std::uint64_t step = 0;

  auto diverge = [&](const std::string& why) {
    if (hooks.output_dir) {
      save_checkpoint(*hooks.output_dir / "final.ckpt", last_good, result.meta);
      write_file_atomic(*hooks.output_dir / "trainlog.csv", write_trainlog_csv(result.log));
    }
    throw NumericalError("training diverged: " + why);
  };

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    const auto batches = make_batches(data.train, tc.batch_size, mix_seed(tc.seed, epoch), true);
    double loss_sum = 0.0;
    for (const auto& b : batches) {
      const DropoutOptions dropout{config.dropout_rate > 0.0, mix_seed(tc.seed ^ kDropoutStream, step++)};
      const auto fwd = forward(params, config, b.inputs, dropout);
      const auto loss = cross_entropy(fwd.logits, b.label_ids);
      if (!std::isfinite(loss.loss)) diverge("non-finite loss in epoch " + std::to_string(epoch));
      const auto grads = backward(params, config, fwd.trace, loss.dlogits);
      try {
        adam_step(params, grads, state, lr, adam);
      } catch (const NumericalError& e) {
        diverge(e.what());
      }
      loss_sum += loss.loss;
    }

    TrainLogRow row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(batches.size());
    row.learning_rate = lr;
    if (has_val) {
      const auto score = score_records(params, config, data.val, data.labels);
      row.val_loss = score.loss;
      row.val_span_f1 = score.span_f1;
    } else {
      row.val_loss = std::numeric_limits<double>::quiet_NaN();
      row.val_span_f1 = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(row.train_loss) || (has_val && !std::isfinite(row.val_loss))) {
      diverge("non-finite loss after epoch " + std::to_string(epoch));
    }
    result.log.push_back(row);
    if (hooks.on_epoch) hooks.on_epoch(row);

    const bool better = has_val ? row.val_span_f1 > best_f1 : row.train_loss < best_loss;
    if (better) {
      best_f1 = row.val_span_f1;
      best_loss = row.train_loss;
      result.best_params = params;
      result.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
    }
    last_good = params;

    TrainLogRow monitored = row;
    if (!has_val) monitored.val_loss = row.train_loss;
    monitor.push_back(monitored);
    lr = lr_schedule(monitor, lr, tc.decay);

    if (tc.early_stop_patience && epochs_since_best >= *tc.early_stop_patience) break;
  }

  result.final_params = std::move(params);
  if (hooks.output_dir) write_outputs(*hooks.output_dir, result.final_params, result.best_params, result.meta, result.log);
  return result;
}

template ValidationScore score_records<float>(const Parameters<float>&, const ModelConfig&,
                                              const std::vector<EncodedRecord>&, const LabelIndex&);
template ValidationScore score_records<double>(const Parameters<double>&, const ModelConfig&,
                                               const std::vector<EncodedRecord>&, const LabelIndex&);
template TrainResult<float> train<float>(const TrainData&, const ModelConfig&, const TrainConfig&,
                                         const TrainHooks&);
template TrainResult<double> train<double>(const TrainData&, const ModelConfig&, const TrainConfig&,
                                           const TrainHooks&);

}  // namespace medner
