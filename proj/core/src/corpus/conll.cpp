#include "medner/corpus/conll.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "medner/error.hpp"

namespace medner {

namespace {

constexpr std::string_view kIdPrefix = "# id:";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string ordinal_id(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", ordinal);
  return buf;
}

/// Calls `on_line(line_no, line)` for each line with any trailing CR removed.
template <class F>
void for_each_line(std::string_view text, F&& on_line) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    on_line(++line_no, line);
    pos = nl + 1;
  }
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }
bool is_comment(std::string_view line) { return line == "#" || line.starts_with("# "); }

}  // namespace

Corpus parse_conll(std::string_view text) {
  std::vector<LabeledRecord> records;
  LabeledRecord current;
  std::size_t block_start_line = 0;

  auto flush = [&] {
    if (current.tokens.empty()) {
      if (!current.record_id.empty()) {
        throw FormatError("id comment '" + current.record_id + "' names an empty record", block_start_line);
      }
      return;
    }
    if (current.record_id.empty()) current.record_id = ordinal_id(records.size() + 1);
    records.push_back(std::move(current));
    current = {};
  };

  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) {
      flush();
      return;
    }
    if (is_comment(line)) {
      if (line.starts_with(kIdPrefix)) {
        auto id = trim(line.substr(kIdPrefix.size()));
        if (id.empty()) throw FormatError("empty record id", line_no);
        current.record_id = std::move(id);
        block_start_line = line_no;
      }
      return;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw FormatError("malformed line (expected token<TAB>tag)", line_no);
    }
    const auto token = line.substr(0, tab);
    if (!is_valid_token(token)) throw FormatError("malformed token", line_no);
    try {
      current.labels.push_back(TagLabel::parse(line.substr(tab + 1)));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    }
    current.tokens.emplace_back(token);
  });
  flush();

  if (records.empty()) throw FormatError("empty file");
  return make_corpus(std::move(records));
}

std::string write_conll(const Corpus& corpus, const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& c : header_comments) out << "# " << c << '\n';
  bool first = true;
  for (const auto& r : corpus.records) {
    if (!first || !header_comments.empty()) out << '\n';
    first = false;
    out << "# id: " << r.record_id << '\n';
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      out << r.tokens[i] << '\t' << r.labels[i].str() << '\n';
    }
  }
  return out.str();
}

std::vector<std::vector<std::string>> parse_token_blocks(std::string_view text) {
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> current;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
      return;
    }
    if (is_comment(line)) return;
    // Tolerate labeled input by ignoring anything after the first tab.
    const auto token = line.substr(0, line.find('\t'));
    if (!is_valid_token(token)) throw FormatError("malformed token", line_no);
    current.emplace_back(token);
  });
  if (!current.empty()) blocks.push_back(std::move(current));
  if (blocks.empty()) throw FormatError("empty input");
  return blocks;
}

Corpus read_conll_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_conll(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace medner
