#include "medner/eval/evaluate.hpp"

#include <algorithm>
#include <cstdio>

#include "medner/corpus/bio.hpp"
#include "medner/error.hpp"
#include "medner/model/encoder.hpp"

namespace medner {

namespace {

constexpr std::size_t kPredictBatch = 32;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_counts(std::string& out, const std::string& prefix, const PrfCounts& c) {
  out += prefix + ".precision = " + fmt(c.precision()) + "\n";
  out += prefix + ".recall = " + fmt(c.recall()) + "\n";
  out += prefix + ".f1 = " + fmt(c.f1()) + "\n";
  out += prefix + ".tp = " + std::to_string(c.tp) + "\n";
  out += prefix + ".fp = " + std::to_string(c.fp) + "\n";
  out += prefix + ".fn = " + std::to_string(c.fn) + "\n";
}

}  // namespace

void check_inventory(const LabelIndex& model_labels, const Corpus& corpus) {
  std::string missing;
  for (const auto& t : corpus.label_inventory) {
    const auto& known = model_labels.entity_types();
    if (std::find(known.begin(), known.end(), t) == known.end()) missing += (missing.empty() ? "" : ", ") + t;
  }
  if (!missing.empty()) throw FormatError("corpus entity types unknown to the model: " + missing);
}

template <class T>
LabelSequences predict_tags(const Checkpoint<T>& checkpoint, const std::vector<std::vector<std::string>>& records) {
  const auto& config = checkpoint.meta.config;
  const auto vocab = Vocabulary::from_tokens(std::span(checkpoint.meta.vocab).subspan(2));
  const auto labels = LabelIndex::from_tags(checkpoint.meta.labels);

  LabelSequences out;
  out.reserve(records.size());
  for (std::size_t start = 0; start < records.size(); start += kPredictBatch) {
    const std::size_t stop = std::min(records.size(), start + kPredictBatch);
    std::vector<std::vector<std::int32_t>> ids;
    for (std::size_t r = start; r < stop; ++r) {
      if (records[r].empty()) throw FormatError("record " + std::to_string(r + 1) + " is empty");
      if (records[r].size() > config.max_len) {
        throw FormatError("record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                          " tokens, more than max_len " + std::to_string(config.max_len));
      }
      auto& seq = ids.emplace_back();
      for (const auto& tok : records[r]) seq.push_back(vocab.id(tok));
    }
    const auto batch = TokenBatch::from_sequences(ids);
    const auto result = forward(checkpoint.params, config, batch);
    const auto predicted = predict_labels(result.logits);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::vector<TagLabel> tags;
      for (std::size_t t = 0; t < ids[i].size(); ++t) tags.push_back(labels.label(predicted[i * batch.length + t]));
      out.push_back(validate_bio(tags, BioMode::repair));
    }
  }
  return out;
}

EvalReport evaluate_predictions(const Corpus& gold, const LabelSequences& pred, const LabelIndex& labels) {
  LabelSequences gold_tags;
  gold_tags.reserve(gold.size());
  for (const auto& r : gold.records) gold_tags.push_back(r.labels);

  EvalReport report;
  report.spans = span_metrics(pred, gold_tags);
  std::vector<std::int32_t> pred_ids;
  std::vector<std::int32_t> gold_ids;
  for (std::size_t r = 0; r < gold.size(); ++r) {
    for (std::size_t t = 0; t < gold_tags[r].size(); ++t) {
      gold_ids.push_back(labels.id(gold_tags[r][t]));
      pred_ids.push_back(labels.id(pred[r][t]));
    }
  }
  report.tokens = token_metrics(pred_ids, gold_ids, {}, labels);
  report.n_records = gold.size();
  report.n_tokens = gold_ids.size();
  return report;
}

template <class T>
EvalReport evaluate(const Checkpoint<T>& checkpoint, const Corpus& corpus) {
  const auto labels = LabelIndex::from_tags(checkpoint.meta.labels);
  check_inventory(labels, corpus);
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(corpus.size());
  for (const auto& r : corpus.records) tokens.push_back(r.tokens);
  return evaluate_predictions(corpus, predict_tags(checkpoint, tokens), labels);
}

std::string write_eval_report(const EvalReport& report) {
  std::string out = "# medner evaluation report\n";
  out += "headline = span.micro.f1\n";
  out += "matching = exact (start, end, type); predictions BIO-repaired\n";
  out += "averaging = micro over entity types; 0/0 reported as 0\n";
  out += "n_records = " + std::to_string(report.n_records) + "\n";
  out += "n_tokens = " + std::to_string(report.n_tokens) + "\n";
  out += "\n[spans]\n";
  out += "gold_spans = " + std::to_string(report.spans.gold_spans) + "\n";
  out += "pred_spans = " + std::to_string(report.spans.pred_spans) + "\n";
  write_counts(out, "micro", report.spans.micro);
  for (const auto& [type, c] : report.spans.per_type) write_counts(out, "type." + type, c);
  out += "\n[tokens]\n";
  out += "counted = " + std::to_string(report.tokens.n_tokens) + "\n";
  write_counts(out, "micro", report.tokens.micro);
  for (const auto& s : report.tokens.per_label) {
    write_counts(out, "label." + s.label, s.counts);
    out += "label." + s.label + ".support = " + std::to_string(s.support) + "\n";
  }
  return out;
}

template LabelSequences predict_tags<float>(const Checkpoint<float>&, const std::vector<std::vector<std::string>>&);
template LabelSequences predict_tags<double>(const Checkpoint<double>&,
                                             const std::vector<std::vector<std::string>>&);
template EvalReport evaluate<float>(const Checkpoint<float>&, const Corpus&);
template EvalReport evaluate<double>(const Checkpoint<double>&, const Corpus&);

}  // namespace medner
