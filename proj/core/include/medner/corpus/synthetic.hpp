#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "medner/corpus/types.hpp"

namespace medner {

struct SyntheticSpec {
  std::size_t n_records = 2000;
  std::vector<std::string> entity_types = {"Disease", "Drug", "Symptom"};
  /// Size of the word inventory shared by filler and entity words.
  std::size_t vocab_size = 500;
  std::size_t max_len = 24;
  std::uint64_t seed = 42;
  /// Probability that a filler slot carries a PHI-shaped token (date, id,
  /// placeholder) instead of a filler word. These are outside vocab_size.
  double phi_rate = 0.02;

  void validate() const;
};

/// Disjoint word lists backing the generator.
struct SyntheticLexicon {
  std::vector<std::string> filler;
  std::vector<std::vector<std::string>> entity_words;  // parallel to entity_types
};

inline constexpr std::size_t kMaxSyntheticEntityTypes = 8;

SyntheticLexicon synthetic_lexicon(const SyntheticSpec& spec);

/// Templated records alternating filler runs and entity mentions; mentions
/// are always separated by at least one filler token, so gold labels are
/// recoverable from the words alone. Deterministic in `spec.seed`.
Corpus gen_synthetic(const SyntheticSpec& spec);

}  // namespace medner
