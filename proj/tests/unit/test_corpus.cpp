#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "medner/corpus/bio.hpp"
#include "medner/corpus/conll.hpp"
#include "medner/corpus/deid.hpp"
#include "medner/corpus/split.hpp"
#include "medner/corpus/synthetic.hpp"
#include "medner/corpus/vocab.hpp"
#include "medner/error.hpp"
#include "oracles.hpp"

using namespace medner;

namespace {

std::vector<TagLabel> tags(std::initializer_list<const char*> items) {
  std::vector<TagLabel> out;
  for (const char* s : items) out.push_back(TagLabel::parse(s));
  return out;
}

LabeledRecord record(std::string id, std::vector<std::string> tokens) {
  LabeledRecord r{std::move(id), std::move(tokens), {}};
  r.labels.assign(r.tokens.size(), TagLabel::outside());
  return r;
}

Corpus numbered_corpus(std::size_t n) {
  std::vector<LabeledRecord> recs;
  for (std::size_t i = 0; i < n; ++i) recs.push_back(record("r" + std::to_string(i), {"tok"}));
  return make_corpus(std::move(recs));
}

}  // namespace

TEST_CASE("tag labels parse and print") {
  CHECK(TagLabel::parse("O") == TagLabel::outside());
  CHECK(TagLabel::parse("B-Drug") == TagLabel::begin("Drug"));
  CHECK(TagLabel::parse("I-Dis_2") == TagLabel::inside("Dis_2"));
  CHECK(TagLabel::parse("I-Dis_2").str() == "I-Dis_2");
  CHECK_THROWS_AS(TagLabel::parse("B-"), FormatError);
  CHECK_THROWS_AS(TagLabel::parse("X-Drug"), FormatError);
  CHECK_THROWS_AS(TagLabel::parse("B-2x"), FormatError);
  CHECK_THROWS_AS(TagLabel::parse("o"), FormatError);
}

TEST_CASE("parse_conll reads one record per block") {
  const auto c = parse_conll("Aspirin\tB-Drug\n50\tI-Drug\nmg\tI-Drug\ndaily\tO\n");
  REQUIRE(c.size() == 1);
  CHECK(c.records[0].tokens == std::vector<std::string>{"Aspirin", "50", "mg", "daily"});
  CHECK(c.records[0].labels == tags({"B-Drug", "I-Drug", "I-Drug", "O"}));
  CHECK(c.records[0].record_id == "000001");
  CHECK(c.label_inventory == std::vector<std::string>{"Drug"});

  const auto two = parse_conll("a\tO\nb\tB-X\nc\tI-X\n\nd\tO\ne\tB-Y\n");
  REQUIRE(two.size() == 2);
  CHECK(two.records[0].size() == 3);
  CHECK(two.records[1].size() == 2);
  CHECK(two.records[1].record_id == "000002");
  CHECK(two.label_inventory == std::vector<std::string>{"X", "Y"});
}

TEST_CASE("parse_conll honours id comments, CRLF and extra blank lines") {
  const auto c = parse_conll("# generated\n# id: note-7\na\tO\r\n\n\n\nb\tB-X\n");
  REQUIRE(c.size() == 2);
  CHECK(c.records[0].record_id == "note-7");
  CHECK(c.records[1].record_id == "000002");
}

TEST_CASE("parse_conll errors") {
  CHECK_THROWS_WITH_AS(parse_conll(""), "empty file", FormatError);
  CHECK_THROWS_WITH_AS(parse_conll("# only a comment\n\n"), "empty file", FormatError);
  try {
    parse_conll("a\tO\nb\tO\nc O\n");
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_conll("a\tO\n\nb\tQ-X\n");
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("unparseable tag") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_conll("a\tO\tO\n"), FormatError);
  CHECK_THROWS_AS(parse_conll("# id: x\na\tO\n\n# id: x\nb\tO\n"), FormatError);
}

TEST_CASE("write_conll round-trips random corpora") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<LabeledRecord> recs;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t r = 0; r < n; ++r) {
      LabeledRecord rec;
      rec.record_id = "id" + std::to_string(trial) + "_" + std::to_string(r);
      rec.labels = oracle::random_valid_sequence(rng, 1 + rng.below(7), {"A", "Bee"});
      for (std::size_t t = 0; t < rec.labels.size(); ++t) rec.tokens.push_back("w" + std::to_string(rng.below(50)));
      recs.push_back(std::move(rec));
    }
    const auto corpus = make_corpus(std::move(recs));
    const auto text = write_conll(corpus, {"header"});
    CHECK(parse_conll(text) == make_corpus(corpus.records));
  }
}

TEST_CASE("validate_bio") {
  CHECK(validate_bio(tags({"O", "I-Drug"}), BioMode::repair) == tags({"O", "B-Drug"}));
  CHECK(validate_bio(tags({"B-Disease", "I-Disease", "O"}), BioMode::strict) == tags({"B-Disease", "I-Disease", "O"}));
  try {
    validate_bio(tags({"B-Drug", "I-Disease"}), BioMode::strict);
    FAIL("expected error");
  } catch (const BioError& e) {
    CHECK(e.index() == 1);
  }
  CHECK_THROWS_AS(validate_bio(tags({"I-X"}), BioMode::strict), BioError);
  CHECK(validate_bio(tags({"I-X", "I-X", "I-Y"}), BioMode::repair) == tags({"B-X", "I-X", "B-Y"}));
}

TEST_CASE("repaired sequences always pass strict validation") {
  Rng rng(5);
  const auto alphabet = oracle::tag_alphabet({"A", "B"});
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TagLabel> seq;
    const std::size_t n = rng.below(10);
    for (std::size_t i = 0; i < n; ++i) seq.push_back(alphabet[rng.below(alphabet.size())]);
    const auto fixed = validate_bio(seq, BioMode::repair);
    CHECK(oracle::bio_valid(fixed));
    CHECK_NOTHROW(validate_bio(fixed, BioMode::strict));
    CHECK(is_valid_bio(seq) == oracle::bio_valid(seq));
  }
}

TEST_CASE("spans_from_labels") {
  const auto spans = spans_from_labels(tags({"B-Drug", "I-Drug", "O", "B-Dis"}));
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == EntitySpan{0, 2, "Drug"});
  CHECK(spans[1] == EntitySpan{3, 4, "Dis"});
  CHECK(spans_from_labels(tags({"O", "O", "O"})).empty());
  CHECK(spans_from_labels(tags({"B-X", "B-X", "I-X"})).size() == 2);
  CHECK_THROWS_AS(spans_from_labels(tags({"O", "I-X"})), BioError);
}

namespace {

std::vector<oracle::SpanTuple> as_tuples(const std::vector<EntitySpan>& spans) {
  std::vector<oracle::SpanTuple> out;
  for (const auto& s : spans) out.emplace_back(s.start, s.end, s.entity_type);
  return out;
}

}  // namespace

TEST_CASE("spans_from_labels agrees with the brute-force enumerator") {
  SUBCASE("exhaustive up to length 8 over two types") {
    std::size_t checked = 0;
    for (std::size_t len = 0; len <= 8; ++len) {
      oracle::for_each_valid_sequence(len, {"A", "B"}, [&](const std::vector<TagLabel>& seq) {
        ++checked;
        if (as_tuples(spans_from_labels(seq)) != oracle::brute_force_spans(seq)) {
          FAIL("mismatch at length " << len);
        }
      });
    }
    CHECK(checked > 10000);
  }
  SUBCASE("20 random sequences") {
    Rng rng(20);
    for (int i = 0; i < 20; ++i) {
      const auto seq = oracle::random_valid_sequence(rng, 5 + rng.below(20), {"Disease", "Drug", "Symptom"});
      CHECK(as_tuples(spans_from_labels(seq)) == oracle::brute_force_spans(seq));
    }
  }
}

TEST_CASE("deidentify") {
  CHECK(deidentify_token("1234567") == "<ID>");
  CHECK(deidentify_token("MRN:00012345") == "<ID>");
  CHECK(deidentify_token("1234") == "1234");
  CHECK(deidentify_token("12/03/2019") == "<DATE>");
  CHECK(deidentify_token("2019-12-03") == "<DATE>");
  CHECK(deidentify_token("1-2-3") == "<DATE>");
  CHECK(deidentify_token("12/03-2019") == "12/03-2019");
  CHECK(deidentify_token("12345/03/2019") == "<ID>");
  CHECK(deidentify_token("[**Known-lastname**]") == "<PHI>");
  CHECK(deidentify_token("[**2101-3-4**]") == "<PHI>");
  CHECK(deidentify_token("aspirin") == "aspirin");
  CHECK(deidentify_token("50mg") == "50mg");

  const std::vector<std::string> samples = {"1234567", "12/03/2019", "[**Name**]", "aspirin", "<ID>", "<DATE>",
                                            "<PHI>", "2019-1-1", "x99999y", "3/4"};
  LabeledRecord r{"r", samples, std::vector<TagLabel>(samples.size(), TagLabel::outside())};
  r.labels[3] = TagLabel::begin("Drug");
  const auto once = deidentify(r);
  CHECK(once.labels == r.labels);
  CHECK(once.tokens.size() == r.tokens.size());
  CHECK(deidentify(once) == once);
}

TEST_CASE("split sizes follow the rounding rule") {
  const SplitSpec defaults;
  CHECK(split_sizes(100, defaults) == SplitSizes{70, 15, 15});
  CHECK(split_sizes(3, defaults) == SplitSizes{2, 0, 1});
  CHECK(split_sizes(10, defaults) == SplitSizes{7, 2, 1});
  CHECK(split_sizes(1234, defaults) == SplitSizes{864, 185, 185});

  const auto parts = split(numbered_corpus(3), defaults);
  CHECK(parts.train.size() == 2);
  CHECK(parts.val.size() == 0);
  CHECK(parts.test.size() == 1);
  REQUIRE(parts.warnings.size() == 1);
  CHECK(parts.warnings[0].find("validation") != std::string::npos);
}

TEST_CASE("split is a deterministic partition") {
  const auto corpus = numbered_corpus(57);
  SplitSpec spec;
  spec.seed = 9;
  const auto a = split(corpus, spec);
  const auto b = split(corpus, spec);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);

  std::multiset<std::string> ids;
  for (const auto* part : {&a.train, &a.val, &a.test}) {
    for (const auto& r : part->records) ids.insert(r.record_id);
  }
  CHECK(ids.size() == 57);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 57);

  spec.seed = 10;
  CHECK_FALSE(split(corpus, spec).train == a.train);
}

TEST_CASE("split errors") {
  CHECK_THROWS_AS(split(numbered_corpus(2), SplitSpec{}), ConfigError);
  CHECK_THROWS_AS(split(numbered_corpus(10), SplitSpec{0.5, 0.5, 0.5, 0}), ConfigError);
  CHECK_THROWS_AS(split(numbered_corpus(10), SplitSpec{0.0, 0.5, 0.5, 0}), ConfigError);
  CHECK_THROWS_AS(split(numbered_corpus(10), SplitSpec{-0.1, 0.6, 0.5, 0}), ConfigError);
}

TEST_CASE("build_vocab") {
  auto corpus = make_corpus({record("1", {"a", "a", "b"}), record("2", {"a"})});
  auto v = build_vocab(corpus, 2, 100);
  CHECK(std::vector<std::string>(v.tokens().begin(), v.tokens().end()) ==
        std::vector<std::string>{"<PAD>", "<UNK>", "a"});

  CHECK(build_vocab(Corpus{}, 1, 10).size() == 2);

  corpus = make_corpus({record("1", {"b", "a", "b", "a", "c"})});
  v = build_vocab(corpus, 1, 100);
  CHECK(std::vector<std::string>(v.tokens().begin(), v.tokens().end()) ==
        std::vector<std::string>{"<PAD>", "<UNK>", "a", "b", "c"});
  CHECK(build_vocab(corpus, 1, 3).size() == 3);
  CHECK(build_vocab(corpus, 1, 3).token(2) == "a");
  CHECK_THROWS_AS(build_vocab(corpus, 1, 1), ConfigError);
}

TEST_CASE("vocabulary file round-trips") {
  const auto v = build_vocab(make_corpus({record("1", {"x", "y", "y", "<ID>"})}), 1, 10);
  const auto text = write_vocab(v);
  CHECK(text.starts_with("<PAD>\n<UNK>\n"));
  CHECK(parse_vocab(text) == v);
  CHECK_THROWS_AS(parse_vocab("<UNK>\n<PAD>\n"), FormatError);
  CHECK_THROWS_AS(parse_vocab("<PAD>\n<UNK>\nx\nx\n"), FormatError);
}

TEST_CASE("encode") {
  const auto vocab = Vocabulary::from_tokens(std::vector<std::string>{"a"});
  const LabelIndex labels({"Drug"});
  LabeledRecord r = record("r", {"a", "zzz"});
  auto e = encode(r, vocab, labels);
  CHECK(e.token_ids == std::vector<std::int32_t>{2, 1});
  CHECK(e.label_ids == std::vector<std::int32_t>{0, 0});

  const Vocabulary empty;
  CHECK(encode(r, empty, labels).token_ids == std::vector<std::int32_t>{1, 1});

  r.labels[1] = TagLabel::inside("Drug");
  CHECK(encode(r, vocab, labels).label_ids == std::vector<std::int32_t>{0, 2});
  r.labels[0] = TagLabel::begin("Other");
  CHECK_THROWS_AS(encode(r, vocab, labels), FormatError);

  const auto v2 = Vocabulary::from_tokens(std::vector<std::string>{"p", "q", "r"});
  const LabeledRecord known = record("k", {"r", "p", "q", "p"});
  CHECK(decode_tokens(encode(known, v2, labels).token_ids, v2) == known.tokens);
}

TEST_CASE("label index layout") {
  const LabelIndex idx({"Disease", "Drug"});
  CHECK(idx.tags() == std::vector<std::string>{"O", "B-Disease", "I-Disease", "B-Drug", "I-Drug"});
  CHECK(idx.id(TagLabel::inside("Drug")) == 4);
  CHECK(LabelIndex::from_tags(idx.tags()) == idx);
  CHECK_THROWS_AS(LabelIndex::from_tags(std::vector<std::string>{"O", "I-X", "B-X"}), FormatError);
}

TEST_CASE("synthetic corpus") {
  SyntheticSpec spec;
  spec.n_records = 10;
  spec.entity_types = {"Disease"};
  spec.vocab_size = 50;
  spec.max_len = 12;
  spec.seed = 7;
  const auto a = gen_synthetic(spec);
  const auto b = gen_synthetic(spec);
  CHECK(write_conll(a) == write_conll(b));
  CHECK(a.size() == 10);
  for (const auto& r : a.records) {
    CHECK(r.size() <= 12);
    CHECK_NOTHROW(validate_bio(r.labels, BioMode::strict));
  }

  spec.seed = 8;
  CHECK_FALSE(write_conll(gen_synthetic(spec)) == write_conll(a));
}

TEST_CASE("synthetic lexicon is disjoint and entity words carry their type") {
  SyntheticSpec spec;
  spec.n_records = 300;
  spec.phi_rate = 0.0;
  const auto lex = synthetic_lexicon(spec);
  std::set<std::string> filler(lex.filler.begin(), lex.filler.end());
  std::map<std::string, std::string> owner;
  std::size_t total = filler.size();
  for (std::size_t t = 0; t < lex.entity_words.size(); ++t) {
    for (const auto& w : lex.entity_words[t]) {
      CHECK_FALSE(filler.contains(w));
      CHECK(owner.emplace(w, spec.entity_types[t]).second);
      ++total;
    }
  }
  CHECK(total == spec.vocab_size);

  const auto corpus = gen_synthetic(spec);
  std::map<std::string, std::size_t> per_type;
  for (const auto& r : corpus.records) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r.labels[i].is_outside()) {
        CHECK(filler.contains(r.tokens[i]));
      } else {
        CHECK(owner.at(r.tokens[i]) == r.labels[i].entity_type);
        ++per_type[r.labels[i].entity_type];
      }
    }
  }
  for (const auto& t : spec.entity_types) {
    CHECK(static_cast<double>(per_type[t]) / static_cast<double>(corpus.token_count()) >= 0.05);
  }
}

TEST_CASE("synthetic corpus meets the entity frequency floor with the maximum type count") {
  SyntheticSpec spec;
  spec.n_records = 2000;
  spec.entity_types = {"A", "B", "C", "D", "E", "F", "G", "H"};
  const auto corpus = gen_synthetic(spec);
  std::map<std::string, std::size_t> per_type;
  for (const auto& r : corpus.records) {
    for (const auto& l : r.labels) {
      if (!l.is_outside()) ++per_type[l.entity_type];
    }
  }
  for (const auto& t : spec.entity_types) {
    CHECK(static_cast<double>(per_type[t]) / static_cast<double>(corpus.token_count()) >= 0.05);
  }
}

TEST_CASE("synthetic spec validation") {
  SyntheticSpec spec;
  spec.vocab_size = 19;
  CHECK_THROWS_AS(gen_synthetic(spec), ConfigError);
  spec = {};
  spec.n_records = 0;
  CHECK_THROWS_AS(gen_synthetic(spec), ConfigError);
  spec = {};
  spec.entity_types = {};
  CHECK_THROWS_AS(gen_synthetic(spec), ConfigError);
  spec.entity_types = {"A", "A"};
  CHECK_THROWS_AS(gen_synthetic(spec), ConfigError);
  spec.entity_types = {"bad-type"};
  CHECK_THROWS_AS(gen_synthetic(spec), ConfigError);
}
