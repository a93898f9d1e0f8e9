#pragma once

#include <string>
#include <string_view>

#include "medner/corpus/types.hpp"

namespace medner {

inline constexpr std::string_view kIdPlaceholder = "<ID>";
inline constexpr std::string_view kDatePlaceholder = "<DATE>";
inline constexpr std::string_view kPhiPlaceholder = "<PHI>";

/// Rewrites one token:
///   `[**...**]`                       -> <PHI>
///   D/M/Y with `/` or `-`, 1-4 digits -> <DATE>
///   any run of five or more digits    -> <ID>
/// Everything else is returned unchanged.
std::string deidentify_token(std::string_view token);

/// Applies deidentify_token to every token; labels are left untouched.
LabeledRecord deidentify(LabeledRecord record);

}  // namespace medner
