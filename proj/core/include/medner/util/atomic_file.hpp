#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace medner {

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace medner
