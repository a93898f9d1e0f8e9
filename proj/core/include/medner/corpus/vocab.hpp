#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medner/corpus/types.hpp"

namespace medner {

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<PAD>";
  static constexpr std::string_view kUnkToken = "<UNK>";

  Vocabulary();

  /// `tokens` are the non-reserved entries in id order, starting at id 2.
  static Vocabulary from_tokens(std::span<const std::string> tokens);

  /// Id of `token`, or kUnk when absent.
  std::int32_t id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::int32_t id) const;
  std::size_t size() const { return tokens_.size(); }
  std::span<const std::string> tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

/// Tokens with frequency >= min_freq, most frequent first, ties broken
/// lexicographically, truncated so the total size (PAD and UNK included)
/// does not exceed max_size.
Vocabulary build_vocab(const Corpus& train, std::size_t min_freq, std::size_t max_size);

/// One token per line; line number is the id.
std::string write_vocab(const Vocabulary& vocab);
Vocabulary parse_vocab(std::string_view text);

/// Label ids: O = 0, then B-T, I-T for each entity type in inventory order.
class LabelIndex {
 public:
  LabelIndex() : LabelIndex(std::vector<std::string>{}) {}
  explicit LabelIndex(std::vector<std::string> entity_types);

  /// Reconstructs the index from the tag strings it produced.
  static LabelIndex from_tags(std::span<const std::string> tags);

  std::int32_t id(const TagLabel& label) const;
  bool contains(const TagLabel& label) const;
  const TagLabel& label(std::int32_t id) const { return labels_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& entity_types() const { return types_; }
  std::vector<std::string> tags() const;

  friend bool operator==(const LabelIndex& a, const LabelIndex& b) { return a.types_ == b.types_; }

 private:
  std::vector<std::string> types_;
  std::vector<TagLabel> labels_;
};

struct EncodedRecord {
  std::string record_id;
  std::vector<std::int32_t> token_ids;
  std::vector<std::int32_t> label_ids;
};

/// Unknown tokens map to kUnk; throws FormatError on a tag outside `labels`.
EncodedRecord encode(const LabeledRecord& record, const Vocabulary& vocab, const LabelIndex& labels);
std::vector<EncodedRecord> encode_corpus(const Corpus& corpus, const Vocabulary& vocab, const LabelIndex& labels);

std::vector<std::string> decode_tokens(std::span<const std::int32_t> ids, const Vocabulary& vocab);

}  // namespace medner
