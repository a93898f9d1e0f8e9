#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "medner/corpus/split.hpp"
#include "medner/corpus/synthetic.hpp"
#include "medner/model/checkpoint.hpp"
#include "medner/model/config.hpp"
#include "medner/training/trainer.hpp"

namespace medner::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnv = "MEDNER_SEED";

/// Everything a pipeline run needs, as read from an INI file.
///
/// Sections: [run] seed; [data] corpus, train, val, test, vocab;
/// [synthetic] records, entity_types, vocab_size, max_len, phi_rate;
/// [split] train_frac, val_frac, test_frac; [vocab] min_freq, max_size;
/// [model] d_model, n_heads, n_layers, d_ff, max_len, dropout;
/// [train] learning_rate, batch_size, max_epochs, decay_factor,
/// decay_patience, min_lr, grad_clip_norm, early_stop_patience, precision;
/// [output] dir. Relative paths resolve against the config file's directory.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> corpus;
  std::optional<SyntheticSpec> synthetic;
  /// [synthetic] seed; when absent the run seed is used.
  std::optional<std::uint64_t> synthetic_seed;
  std::optional<std::filesystem::path> train_path, val_path, test_path, vocab_path;
  SplitSpec split;
  std::size_t min_freq = 1;
  std::size_t max_vocab = 50000;
  ModelConfig model;
  TrainConfig train;
  Precision precision = Precision::f32;
  std::filesystem::path output_dir = "medner_run";

  std::filesystem::path data_dir() const { return output_dir / "data"; }
  std::filesystem::path model_dir() const { return output_dir / "model"; }
  std::filesystem::path eval_dir() const { return output_dir / "eval"; }
  std::filesystem::path train_file() const { return train_path.value_or(data_dir() / "train.conll"); }
  std::filesystem::path val_file() const { return val_path.value_or(data_dir() / "val.conll"); }
  std::filesystem::path test_file() const { return test_path.value_or(data_dir() / "test.conll"); }
  std::filesystem::path vocab_file() const { return vocab_path.value_or(data_dir() / "vocab.txt"); }
};

/// Parses INI text; `base_dir` anchors relative paths. Unknown sections or
/// keys and unparseable values raise ConfigError.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Flag, then config, then the MEDNER_SEED environment variable, then kDefaultSeed.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config);

}  // namespace medner::cli
