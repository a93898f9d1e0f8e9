#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "medner/corpus/types.hpp"

namespace medner {

/// Parses the tab-separated labeled-corpus format.
///
/// One `token<TAB>tag` per line, records separated by blank lines, `# `
/// comment lines ignored except `# id: NAME`, which names the enclosing
/// record. Records without an id comment get their 1-based block ordinal,
/// zero-padded to six digits. Throws FormatError carrying the line number.
Corpus parse_conll(std::string_view text);

/// Inverse of parse_conll. Every record is preceded by its `# id:` line;
/// `header_comments` are emitted first, each prefixed with `# `.
std::string write_conll(const Corpus& corpus, const std::vector<std::string>& header_comments = {});

/// Unlabeled input: one token per line, blank-line separated blocks.
std::vector<std::vector<std::string>> parse_token_blocks(std::string_view text);

Corpus read_conll_file(const std::filesystem::path& path);

}  // namespace medner
