#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medner {

enum class BioPosition : std::uint8_t { O, B, I };

/// One BIO tag. `entity_type` is empty exactly when the position is O.
struct TagLabel {
  BioPosition position = BioPosition::O;
  std::string entity_type;

  static TagLabel outside() { return {}; }
  static TagLabel begin(std::string type) { return {BioPosition::B, std::move(type)}; }
  static TagLabel inside(std::string type) { return {BioPosition::I, std::move(type)}; }

  /// Parses `O`, `B-TYPE` or `I-TYPE`; throws FormatError otherwise.
  static TagLabel parse(std::string_view tag);

  std::string str() const;
  bool is_outside() const { return position == BioPosition::O; }

  friend bool operator==(const TagLabel&, const TagLabel&) = default;
};

/// True for `[A-Za-z][A-Za-z0-9_]*`.
bool is_valid_entity_type(std::string_view type);

/// True for non-empty strings without blank, tab, CR or LF characters.
bool is_valid_token(std::string_view token);

struct LabeledRecord {
  std::string record_id;
  std::vector<std::string> tokens;
  std::vector<TagLabel> labels;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const LabeledRecord&, const LabeledRecord&) = default;
};

struct Corpus {
  std::vector<LabeledRecord> records;
  /// Sorted, deduplicated entity types.
  std::vector<std::string> label_inventory;

  std::size_t size() const { return records.size(); }
  std::size_t token_count() const;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Builds a corpus, checking record invariants and unique ids, and deriving
/// the label inventory from the labels present plus `extra_types`.
Corpus make_corpus(std::vector<LabeledRecord> records, std::vector<std::string> extra_types = {});

/// Half-open token range [start, end) carrying one entity type.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string entity_type;

  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

}  // namespace medner
