#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "medner/corpus/types.hpp"

namespace medner {

struct SplitSpec {
  double train_frac = 0.70;
  double val_frac = 0.15;
  double test_frac = 0.15;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless all fractions lie in [0,1] and sum to 1 (1e-9).
  void validate() const;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

/// train = round(n*train_frac), val = round(n*val_frac), test = remainder.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
  /// Non-fatal issues such as an empty validation or test partition.
  std::vector<std::string> warnings;
};

/// Seeded whole-record shuffle followed by a contiguous partition. All three
/// parts keep the parent corpus's label inventory.
CorpusSplit split(const Corpus& corpus, const SplitSpec& spec);

}  // namespace medner
