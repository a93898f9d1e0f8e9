#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "medner/model/config.hpp"
#include "medner/model/parameters.hpp"

namespace medner {

inline constexpr int kCheckpointVersion = 1;

enum class Precision { f32, f64 };

std::string_view precision_tag(Precision p);
Precision parse_precision(std::string_view tag);

template <class T>
constexpr Precision precision_of();
template <>
constexpr Precision precision_of<float>() { return Precision::f32; }
template <>
constexpr Precision precision_of<double>() { return Precision::f64; }

/// Everything in a checkpoint besides the tensors.
struct CheckpointMeta {
  ModelConfig config;
  std::uint64_t seed = 0;
  /// Label tags in id order (O, B-T, I-T, ...).
  std::vector<std::string> labels;
  /// Vocabulary tokens in id order, PAD and UNK included.
  std::vector<std::string> vocab;

  friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

template <class T>
struct Checkpoint {
  Parameters<T> params;
  CheckpointMeta meta;
};

/// Layout:
///   line 1: `MEDNER-CKPT`
///   line 2: single-line JSON manifest (format_version, config, seed,
///           precision, labels, vocab, tensors[{name, shape, offset, length}],
///           payload_bytes)
///   rest:   little-endian IEEE-754 payload, tensors concatenated in manifest order
template <class T>
std::string encode_checkpoint(const Parameters<T>& params, const CheckpointMeta& meta);

/// Throws FormatError on a bad magic line, unknown version, precision
/// mismatch, tensor/config disagreement (naming the tensor) or a payload
/// shorter than the manifest declares ("truncated payload").
template <class T>
Checkpoint<T> decode_checkpoint(std::string_view bytes);

/// Precision tag of an encoded checkpoint without decoding the payload.
Precision checkpoint_precision(std::string_view bytes);

/// Writes via a temporary file and rename.
template <class T>
void save_checkpoint(const std::filesystem::path& path, const Parameters<T>& params, const CheckpointMeta& meta);

template <class T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace medner
