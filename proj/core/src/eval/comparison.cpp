#include "medner/eval/comparison.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "medner/error.hpp"

namespace medner {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

double parse_pct(const std::string& cell, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
    throw FormatError("malformed number '" + cell + "'", line_no);
  }
  if (v < 0.0 || v > 100.0) throw FormatError("percentage outside [0, 100]: " + cell, line_no);
  return v;
}

}  // namespace

std::string format_percent(double value) {
  const double tenths = std::floor(value * 10.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", tenths / 10.0);
  return buf;
}

std::string render_comparison(std::span<const ComparisonRow> rows) {
  std::string out = "Model | Precision% | F1-score\n:--- | ---: | ---:\n";
  for (const auto& r : rows) {
    out += r.model_name + " | " + format_percent(r.precision_pct) + " | " + format_percent(r.f1_pct) + "\n";
  }
  return out;
}

void sort_by_f1(std::vector<ComparisonRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.f1_pct > b.f1_pct; });
}

std::vector<ComparisonRow> parse_comparison_rows(std::string_view text) {
  std::vector<ComparisonRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_content = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!seen_content) {
      seen_content = true;
      std::string first = cells.front();
      std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
      if (first.starts_with("model")) continue;
    }
    if (cells.size() != 3 || cells[0].empty()) {
      throw FormatError("expected name,precision_pct,f1_pct", line_no);
    }
    rows.push_back({cells[0], parse_pct(cells[1], line_no), parse_pct(cells[2], line_no)});
  }
  return rows;
}

}  // namespace medner
