#include "medner/corpus/synthetic.hpp"

#include <array>
#include <cstdio>

#include "medner/error.hpp"
#include "medner/rng.hpp"

namespace medner {

namespace {

constexpr std::array<char, 15> kConsonants = {'b', 'd', 'f', 'g', 'k', 'l', 'm', 'n',
                                              'p', 'r', 's', 't', 'v', 'z', 'h'};
constexpr std::array<char, 5> kVowels = {'a', 'e', 'i', 'o', 'u'};
constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();
constexpr std::size_t kWordSyllables = 3;
constexpr std::size_t kMaxWords = kSyllables * kSyllables * kSyllables;

/// Injective map from an index to a three-syllable pseudo-word.
std::string pseudo_word(std::size_t index) {
  std::string w;
  for (std::size_t s = 0; s < kWordSyllables; ++s) {
    const std::size_t syl = index % kSyllables;
    index /= kSyllables;
    w += kConsonants[syl / kVowels.size()];
    w += kVowels[syl % kVowels.size()];
  }
  return w;
}

std::string phi_token(Rng& rng) {
  char buf[48];
  switch (rng.below(3)) {
    case 0:
      std::snprintf(buf, sizeof buf, "%02u/%02u/%04u", static_cast<unsigned>(1 + rng.below(28)),
                    static_cast<unsigned>(1 + rng.below(12)), static_cast<unsigned>(1990 + rng.below(35)));
      return buf;
    case 1:
      std::snprintf(buf, sizeof buf, "%07u", static_cast<unsigned>(rng.below(10000000)));
      return buf;
    default:
      return "[**Name" + std::to_string(rng.below(100)) + "**]";
  }
}

template <class V>
const auto& pick(Rng& rng, const V& v) {
  return v[rng.below(v.size())];
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_records < 1) throw ConfigError("synthetic corpus needs at least one record");
  if (entity_types.empty()) throw ConfigError("synthetic corpus needs at least one entity type");
  if (entity_types.size() > kMaxSyntheticEntityTypes) {
    throw ConfigError("synthetic corpus supports at most " + std::to_string(kMaxSyntheticEntityTypes) +
                      " entity types");
  }
  for (const auto& t : entity_types) {
    if (!is_valid_entity_type(t)) throw ConfigError("invalid entity type '" + t + "'");
  }
  for (std::size_t i = 0; i < entity_types.size(); ++i) {
    for (std::size_t j = i + 1; j < entity_types.size(); ++j) {
      if (entity_types[i] == entity_types[j]) throw ConfigError("duplicate entity type '" + entity_types[i] + "'");
    }
  }
  if (vocab_size < 20) throw ConfigError("synthetic vocab_size must be at least 20");
  if (vocab_size > kMaxWords) throw ConfigError("synthetic vocab_size too large");
  if (max_len < 1) throw ConfigError("synthetic max_len must be at least 1");
  if (!(phi_rate >= 0.0 && phi_rate <= 1.0)) throw ConfigError("phi_rate must lie in [0, 1]");
}

SyntheticLexicon synthetic_lexicon(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticLexicon lex;
  const std::size_t n_filler = spec.vocab_size / 2;
  const std::size_t n_entity = spec.vocab_size - n_filler;
  const std::size_t k = spec.entity_types.size();
  std::size_t next = 0;
  for (std::size_t i = 0; i < n_filler; ++i) lex.filler.push_back(pseudo_word(next++));
  lex.entity_words.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t count = n_entity / k + (t < n_entity % k ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) lex.entity_words[t].push_back(pseudo_word(next++));
  }
  return lex;
}

Corpus gen_synthetic(const SyntheticSpec& spec) {
  const SyntheticLexicon lex = synthetic_lexicon(spec);
  const std::size_t k = spec.entity_types.size();
  Rng rng(spec.seed);

  std::vector<LabeledRecord> records;
  records.reserve(spec.n_records);
  for (std::size_t r = 0; r < spec.n_records; ++r) {
    const std::size_t min_len = (spec.max_len + 1) / 2;
    const std::size_t len = min_len + rng.below(spec.max_len - min_len + 1);

    LabeledRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "syn%06zu", r + 1);
    rec.record_id = id;

    bool after_mention = false;
    while (rec.tokens.size() < len) {
      const std::size_t room = len - rec.tokens.size();
      if (!after_mention && rng.bernoulli(0.5)) {
        const std::size_t type = rng.below(k);
        const std::size_t mention = std::min<std::size_t>(1 + rng.below(3), room);
        for (std::size_t i = 0; i < mention; ++i) {
          rec.tokens.push_back(pick(rng, lex.entity_words[type]));
          rec.labels.push_back(i == 0 ? TagLabel::begin(spec.entity_types[type])
                                      : TagLabel::inside(spec.entity_types[type]));
        }
        after_mention = true;
      } else {
        const std::size_t run = std::min<std::size_t>(after_mention ? 1 : 1 + rng.below(2), room);
        for (std::size_t i = 0; i < run; ++i) {
          rec.tokens.push_back(rng.bernoulli(spec.phi_rate) ? phi_token(rng) : pick(rng, lex.filler));
          rec.labels.push_back(TagLabel::outside());
        }
        after_mention = false;
      }
    }
    records.push_back(std::move(rec));
  }
  return make_corpus(std::move(records), spec.entity_types);
}

}  // namespace medner
