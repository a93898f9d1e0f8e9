#include "medner/training/batching.hpp"

#include <numeric>

#include "medner/error.hpp"
#include "medner/rng.hpp"
#include "medner/training/loss.hpp"

namespace medner {

std::vector<Batch> make_batches(std::span<const EncodedRecord> records, std::size_t batch_size, std::uint64_t seed,
                                bool shuffle) {
  if (records.empty()) throw ConfigError("make_batches needs at least one record");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    Rng rng(seed);
    rng.shuffle(order.begin(), order.end());
  }

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    Batch b;
    b.record_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                            order.begin() + static_cast<std::ptrdiff_t>(stop));
    std::vector<std::vector<std::int32_t>> ids;
    for (auto idx : b.record_indices) ids.push_back(records[idx].token_ids);
    b.inputs = TokenBatch::from_sequences(ids);
    b.label_ids.assign(b.inputs.batch * b.inputs.length, kIgnoreLabel);
    for (std::size_t i = 0; i < b.record_indices.size(); ++i) {
      const auto& labels = records[b.record_indices[i]].label_ids;
      for (std::size_t t = 0; t < labels.size(); ++t) b.label_ids[i * b.inputs.length + t] = labels[t];
      b.active_count += labels.size();
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace medner
