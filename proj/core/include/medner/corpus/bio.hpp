#pragma once

#include <span>
#include <vector>

#include "medner/corpus/types.hpp"

namespace medner {

enum class BioMode { strict, repair };

/// Strict mode returns the labels unchanged or throws BioError at the first
/// I tag lacking a same-type B/I predecessor. Repair mode rewrites each such
/// I into a B of the same type.
std::vector<TagLabel> validate_bio(std::span<const TagLabel> labels, BioMode mode);

bool is_valid_bio(std::span<const TagLabel> labels);

/// Maximal B I* runs, sorted by start. Throws BioError on invalid input.
std::vector<EntitySpan> spans_from_labels(std::span<const TagLabel> labels);

}  // namespace medner
