#include "medner/corpus/deid.hpp"

#include <regex>

namespace medner {

namespace {

const std::regex& placeholder_pattern() {
  static const std::regex re(R"(^\[\*\*.*\*\*\]$)");
  return re;
}

// Both separators must agree: 12/03/2019, 2019-12-03, 1-2-3.
const std::regex& date_pattern() {
  static const std::regex re(R"(^[0-9]{1,4}([/-])[0-9]{1,4}\1[0-9]{1,4}$)");
  return re;
}

const std::regex& id_pattern() {
  static const std::regex re(R"([0-9]{5,})");
  return re;
}

}  // namespace

std::string deidentify_token(std::string_view token) {
  const std::string s(token);
  if (std::regex_match(s, placeholder_pattern())) return std::string(kPhiPlaceholder);
  if (std::regex_match(s, date_pattern())) return std::string(kDatePlaceholder);
  if (std::regex_search(s, id_pattern())) return std::string(kIdPlaceholder);
  return s;
}

LabeledRecord deidentify(LabeledRecord record) {
  for (auto& t : record.tokens) t = deidentify_token(t);
  return record;
}

}  // namespace medner
