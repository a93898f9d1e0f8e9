#include "medner/eval/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "medner/corpus/bio.hpp"
#include "medner/error.hpp"
#include "medner/training/loss.hpp"

namespace medner {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double PrfCounts::precision() const { return ratio(tp, tp + fp); }
double PrfCounts::recall() const { return ratio(tp, tp + fn); }
double PrfCounts::f1() const { return f1_score(precision(), recall()); }

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

SpanMetrics span_metrics(const LabelSequences& pred, const LabelSequences& gold) {
  if (pred.size() != gold.size()) {
    throw FormatError("span_metrics: " + std::to_string(pred.size()) + " predicted records vs " +
                      std::to_string(gold.size()) + " gold records");
  }
  SpanMetrics m;
  for (std::size_t r = 0; r < gold.size(); ++r) {
    if (pred[r].size() != gold[r].size()) {
      throw FormatError("span_metrics: length mismatch in record " + std::to_string(r));
    }
    const auto gold_spans = spans_from_labels(gold[r]);
    const auto pred_spans = spans_from_labels(validate_bio(pred[r], BioMode::repair));
    const std::set<EntitySpan> gold_set(gold_spans.begin(), gold_spans.end());
    m.gold_spans += gold_spans.size();
    m.pred_spans += pred_spans.size();
    for (const auto& s : pred_spans) {
      auto& c = m.per_type[s.entity_type];
      if (gold_set.contains(s)) {
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
    const std::set<EntitySpan> pred_set(pred_spans.begin(), pred_spans.end());
    for (const auto& s : gold_spans) {
      if (!pred_set.contains(s)) ++m.per_type[s.entity_type].fn;
    }
  }
  for (const auto& [type, c] : m.per_type) m.micro += c;
  return m;
}

TokenMetrics token_metrics(std::span<const std::int32_t> pred, std::span<const std::int32_t> gold,
                           std::span<const std::uint8_t> active, const LabelIndex& labels) {
  if (pred.size() != gold.size() || (!active.empty() && active.size() != gold.size())) {
    throw FormatError("token_metrics: prediction, gold and mask lengths differ");
  }
  const std::size_t K = labels.size();
  TokenMetrics m;
  for (std::size_t k = 0; k < K; ++k) m.per_label.push_back({labels.label(static_cast<std::int32_t>(k)).str(), {}, 0});
  auto in_range = [K](std::int32_t id) { return id >= 0 && static_cast<std::size_t>(id) < K; };
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if ((!active.empty() && !active[i]) || gold[i] == kIgnoreLabel) continue;
    if (!in_range(gold[i]) || !in_range(pred[i])) throw FormatError("token_metrics: label id out of range");
    ++m.n_tokens;
    auto& g = m.per_label[static_cast<std::size_t>(gold[i])];
    ++g.support;
    if (pred[i] == gold[i]) {
      ++g.counts.tp;
    } else {
      ++g.counts.fn;
      ++m.per_label[static_cast<std::size_t>(pred[i])].counts.fp;
    }
  }
  for (std::size_t k = 1; k < K; ++k) m.micro += m.per_label[k].counts;
  return m;
}

}  // namespace medner
