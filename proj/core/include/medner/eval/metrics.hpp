#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "medner/corpus/types.hpp"
#include "medner/corpus/vocab.hpp"

namespace medner {

/// Confusion counts; every ratio with a zero denominator is 0.
struct PrfCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  PrfCounts& operator+=(const PrfCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const PrfCounts&, const PrfCounts&) = default;
};

/// 2PR/(P+R), or 0 when P+R is 0.
double f1_score(double precision, double recall);

using LabelSequences = std::vector<std::vector<TagLabel>>;

struct SpanMetrics {
  PrfCounts micro;
  std::map<std::string, PrfCounts> per_type;
  std::size_t gold_spans = 0;
  std::size_t pred_spans = 0;

  friend bool operator==(const SpanMetrics&, const SpanMetrics&) = default;
};

/// Exact-match entity spans: a predicted (start, end, type) is a true
/// positive iff the gold record contains the identical span. Predictions are
/// BIO-repaired first; gold must be strictly valid. Throws FormatError on a
/// record count or length mismatch.
SpanMetrics span_metrics(const LabelSequences& pred, const LabelSequences& gold);

struct LabelStats {
  std::string label;
  PrfCounts counts;
  std::size_t support = 0;

  friend bool operator==(const LabelStats&, const LabelStats&) = default;
};

struct TokenMetrics {
  std::vector<LabelStats> per_label;  // label id order, O included
  PrfCounts micro;                    // pooled over every label except O
  std::size_t n_tokens = 0;           // positions counted

  friend bool operator==(const TokenMetrics&, const TokenMetrics&) = default;
};

/// One-vs-rest counts per label over positions where `active` is nonzero
/// (an empty mask counts every position) and gold is not kIgnoreLabel.
TokenMetrics token_metrics(std::span<const std::int32_t> pred, std::span<const std::int32_t> gold,
                           std::span<const std::uint8_t> active, const LabelIndex& labels);

}  // namespace medner
