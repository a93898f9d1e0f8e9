#include "medner/corpus/types.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "medner/error.hpp"

namespace medner {

namespace {

bool is_ascii_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool is_valid_entity_type(std::string_view type) {
  if (type.empty() || !is_ascii_alpha(type.front())) return false;
  return std::all_of(type.begin(), type.end(),
                     [](char c) { return is_ascii_alpha(c) || is_ascii_digit(c) || c == '_'; });
}

bool is_valid_token(std::string_view token) {
  if (token.empty()) return false;
  return token.find_first_of(" \t\r\n") == std::string_view::npos;
}

TagLabel TagLabel::parse(std::string_view tag) {
  if (tag == "O") return outside();
  if (tag.size() > 2 && tag[1] == '-' && (tag[0] == 'B' || tag[0] == 'I')) {
    const auto type = tag.substr(2);
    if (is_valid_entity_type(type)) {
      return {tag[0] == 'B' ? BioPosition::B : BioPosition::I, std::string(type)};
    }
  }
  throw FormatError("unparseable tag '" + std::string(tag) + "' (expected O, B-TYPE or I-TYPE)");
}

std::string TagLabel::str() const {
  switch (position) {
    case BioPosition::O:
      return "O";
    case BioPosition::B:
      return "B-" + entity_type;
    case BioPosition::I:
      return "I-" + entity_type;
  }
  return "O";
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.size();
  return n;
}

Corpus make_corpus(std::vector<LabeledRecord> records, std::vector<std::string> extra_types) {
  std::unordered_set<std::string> ids;
  std::set<std::string> types(extra_types.begin(), extra_types.end());
  for (const auto& r : records) {
    if (!ids.insert(r.record_id).second) {
      throw FormatError("duplicate record id '" + r.record_id + "'");
    }
    if (r.tokens.empty() || r.tokens.size() != r.labels.size()) {
      throw FormatError("record '" + r.record_id + "' must have equally many (>= 1) tokens and labels");
    }
    for (const auto& t : r.tokens) {
      if (!is_valid_token(t)) throw FormatError("record '" + r.record_id + "' has an invalid token");
    }
    for (const auto& l : r.labels) {
      if (l.is_outside() != l.entity_type.empty()) {
        throw FormatError("record '" + r.record_id + "' has an inconsistent tag");
      }
      if (!l.is_outside()) types.insert(l.entity_type);
    }
  }
  Corpus corpus;
  corpus.records = std::move(records);
  corpus.label_inventory.assign(types.begin(), types.end());
  return corpus;
}

}  // namespace medner
