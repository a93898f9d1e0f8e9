#include "medner/corpus/bio.hpp"

#include "medner/error.hpp"

namespace medner {

namespace {

/// An I tag at `k` is valid iff the previous tag is B or I of the same type.
bool continues(std::span<const TagLabel> labels, std::size_t k) {
  if (k == 0) return false;
  const auto& prev = labels[k - 1];
  return !prev.is_outside() && prev.entity_type == labels[k].entity_type;
}

}  // namespace

std::vector<TagLabel> validate_bio(std::span<const TagLabel> labels, BioMode mode) {
  std::vector<TagLabel> out(labels.begin(), labels.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k].position != BioPosition::I || continues(out, k)) continue;
    if (mode == BioMode::strict) {
      const std::string prev = k == 0 ? "sequence start" : out[k - 1].str();
      throw BioError(out[k].str() + " follows " + prev, k);
    }
    out[k].position = BioPosition::B;
  }
  return out;
}

bool is_valid_bio(std::span<const TagLabel> labels) {
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k].position == BioPosition::I && !continues(labels, k)) return false;
  }
  return true;
}

std::vector<EntitySpan> spans_from_labels(std::span<const TagLabel> labels) {
  std::vector<EntitySpan> spans;
  std::size_t k = 0;
  while (k < labels.size()) {
    const auto& l = labels[k];
    if (l.position == BioPosition::O) {
      ++k;
      continue;
    }
    if (l.position == BioPosition::I) throw BioError(l.str() + " does not continue an entity", k);
    std::size_t end = k + 1;
    while (end < labels.size() && labels[end].position == BioPosition::I &&
           labels[end].entity_type == l.entity_type) {
      ++end;
    }
    spans.push_back({k, end, l.entity_type});
    k = end;
  }
  return spans;
}

}  // namespace medner
