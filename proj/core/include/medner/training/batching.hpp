#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "medner/corpus/vocab.hpp"
#include "medner/model/encoder.hpp"

namespace medner {

struct Batch {
  TokenBatch inputs;
  /// [batch, length]; kIgnoreLabel exactly where inputs.mask is 0.
  std::vector<std::int32_t> label_ids;
  std::size_t active_count = 0;
  /// Positions of the member records in the input list.
  std::vector<std::size_t> record_indices;
};

/// Optional seeded shuffle, then consecutive groups of at most batch_size
/// records, each padded to its own longest member.
std::vector<Batch> make_batches(std::span<const EncodedRecord> records, std::size_t batch_size, std::uint64_t seed,
                                bool shuffle);

}  // namespace medner
