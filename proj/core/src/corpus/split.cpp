#include "medner/corpus/split.hpp"

#include <cmath>
#include <numeric>

#include "medner/error.hpp"
#include "medner/rng.hpp"

namespace medner {

void SplitSpec::validate() const {
  for (double f : {train_frac, val_frac, test_frac}) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0, 1]");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  const auto nd = static_cast<double>(n);
  SplitSizes s;
  s.train = static_cast<std::size_t>(std::round(nd * spec.train_frac));
  s.val = static_cast<std::size_t>(std::round(nd * spec.val_frac));
  if (s.train + s.val > n) {
    throw ConfigError("split fractions over-allocate " + std::to_string(n) + " records");
  }
  s.test = n - s.train - s.val;
  return s;
}

CorpusSplit split(const Corpus& corpus, const SplitSpec& spec) {
  const std::size_t n = corpus.size();
  if (n < 3) throw ConfigError("split needs at least 3 records, got " + std::to_string(n));
  const SplitSizes sizes = split_sizes(n, spec);
  if (sizes.train == 0) throw ConfigError("split leaves the training partition empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(order.begin(), order.end());

  CorpusSplit out;
  for (Corpus* part : {&out.train, &out.val, &out.test}) part->label_inventory = corpus.label_inventory;
  for (std::size_t i = 0; i < n; ++i) {
    Corpus& dst = i < sizes.train ? out.train : i < sizes.train + sizes.val ? out.val : out.test;
    dst.records.push_back(corpus.records[order[i]]);
  }
  if (sizes.val == 0) out.warnings.push_back("validation partition is empty");
  if (sizes.test == 0) out.warnings.push_back("test partition is empty");
  return out;
}

}  // namespace medner
