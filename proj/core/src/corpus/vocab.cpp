#include "medner/corpus/vocab.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "medner/error.hpp"

namespace medner {

Vocabulary::Vocabulary() : tokens_{std::string(kPadToken), std::string(kUnkToken)} {
  ids_.emplace(kPadToken, kPad);
  ids_.emplace(kUnkToken, kUnk);
}

Vocabulary Vocabulary::from_tokens(std::span<const std::string> tokens) {
  Vocabulary v;
  for (const auto& t : tokens) {
    if (!is_valid_token(t)) throw FormatError("invalid vocabulary token");
    const auto id = static_cast<std::int32_t>(v.tokens_.size());
    if (!v.ids_.emplace(t, id).second) throw FormatError("duplicate vocabulary token '" + t + "'");
    v.tokens_.push_back(t);
  }
  return v;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.contains(std::string(token)); }

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw FormatError("token id " + std::to_string(id) + " outside vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

Vocabulary build_vocab(const Corpus& train, std::size_t min_freq, std::size_t max_size) {
  if (max_size < 2) throw ConfigError("vocabulary max_size must be at least 2");
  std::map<std::string, std::size_t> counts;
  for (const auto& r : train.records) {
    for (const auto& t : r.tokens) {
      if (t != Vocabulary::kPadToken && t != Vocabulary::kUnkToken) ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_freq) ranked.emplace_back(tok, n);
  }
  // Frequency descending, ties lexicographic.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size - 2) ranked.resize(max_size - 2);

  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [tok, n] : ranked) tokens.push_back(std::move(tok));
  return Vocabulary::from_tokens(tokens);
}

std::string write_vocab(const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocabulary parse_vocab(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = nl + 1;
  }
  if (lines.size() < 2 || lines[0] != Vocabulary::kPadToken || lines[1] != Vocabulary::kUnkToken) {
    throw FormatError("vocabulary must start with <PAD> and <UNK>");
  }
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (!is_valid_token(lines[i])) throw FormatError("invalid vocabulary entry", i + 1);
  }
  return Vocabulary::from_tokens(std::span(lines).subspan(2));
}

LabelIndex::LabelIndex(std::vector<std::string> entity_types) : types_(std::move(entity_types)) {
  labels_.push_back(TagLabel::outside());
  for (const auto& t : types_) {
    if (!is_valid_entity_type(t)) throw FormatError("invalid entity type '" + t + "'");
    labels_.push_back(TagLabel::begin(t));
    labels_.push_back(TagLabel::inside(t));
  }
}

LabelIndex LabelIndex::from_tags(std::span<const std::string> tags) {
  if (tags.empty() || tags.size() % 2 == 0) throw FormatError("label list must be O followed by B/I pairs");
  std::vector<std::string> types;
  for (std::size_t i = 1; i < tags.size(); i += 2) types.push_back(TagLabel::parse(tags[i]).entity_type);
  LabelIndex index(std::move(types));
  if (index.tags() != std::vector<std::string>(tags.begin(), tags.end())) {
    throw FormatError("label list is not in canonical O, B-T, I-T order");
  }
  return index;
}

std::int32_t LabelIndex::id(const TagLabel& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<std::int32_t>(i);
  }
  throw FormatError("unseen tag '" + label.str() + "'");
}

bool LabelIndex::contains(const TagLabel& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::vector<std::string> LabelIndex::tags() const {
  std::vector<std::string> out;
  for (const auto& l : labels_) out.push_back(l.str());
  return out;
}

EncodedRecord encode(const LabeledRecord& record, const Vocabulary& vocab, const LabelIndex& labels) {
  EncodedRecord e;
  e.record_id = record.record_id;
  e.token_ids.reserve(record.size());
  e.label_ids.reserve(record.size());
  for (const auto& t : record.tokens) e.token_ids.push_back(vocab.id(t));
  for (const auto& l : record.labels) e.label_ids.push_back(labels.id(l));
  return e;
}

std::vector<EncodedRecord> encode_corpus(const Corpus& corpus, const Vocabulary& vocab, const LabelIndex& labels) {
  std::vector<EncodedRecord> out;
  out.reserve(corpus.size());
  for (const auto& r : corpus.records) out.push_back(encode(r, vocab, labels));
  return out;
}

std::vector<std::string> decode_tokens(std::span<const std::int32_t> ids, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(vocab.token(id));
  return out;
}

}  // namespace medner
