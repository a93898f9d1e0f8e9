#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medner {

struct ComparisonRow {
  std::string model_name;
  double precision_pct = 0.0;
  double f1_pct = 0.0;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

/// One decimal place, halves rounded up: 89.75 -> "89.8".
std::string format_percent(double value);

/// Markdown table `Model | Precision% | F1-score` with an alignment rule
/// row, one line per row in the given order.
std::string render_comparison(std::span<const ComparisonRow> rows);

/// Stable sort by F1 descending.
void sort_by_f1(std::vector<ComparisonRow>& rows);

/// `name,precision_pct,f1_pct` per line; blank lines and `#` comments are
/// skipped, as is a leading header line starting with `model`. Throws
/// FormatError (with line number) on malformed rows or values outside [0,100].
std::vector<ComparisonRow> parse_comparison_rows(std::string_view text);

}  // namespace medner
