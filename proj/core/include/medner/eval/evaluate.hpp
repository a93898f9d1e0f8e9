#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "medner/corpus/types.hpp"
#include "medner/corpus/vocab.hpp"
#include "medner/eval/metrics.hpp"
#include "medner/model/checkpoint.hpp"

namespace medner {

struct EvalReport {
  SpanMetrics spans;
  TokenMetrics tokens;
  std::size_t n_records = 0;
  std::size_t n_tokens = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Throws FormatError naming every corpus entity type the model lacks.
void check_inventory(const LabelIndex& model_labels, const Corpus& corpus);

/// Per-token argmax tags for pre-tokenized records, BIO-repaired.
template <class T>
LabelSequences predict_tags(const Checkpoint<T>& checkpoint, const std::vector<std::vector<std::string>>& records);

/// Scores already-repaired predictions against a gold corpus.
EvalReport evaluate_predictions(const Corpus& gold, const LabelSequences& pred, const LabelIndex& labels);

/// Predicts every record of `corpus` with the checkpoint and scores it.
template <class T>
EvalReport evaluate(const Checkpoint<T>& checkpoint, const Corpus& corpus);

/// `key = value` lines: header, [spans] section, then [tokens] section.
std::string write_eval_report(const EvalReport& report);

}  // namespace medner
