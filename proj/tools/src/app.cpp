#include "medner/cli/app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "medner/cli/run_config.hpp"
#include "medner/corpus/bio.hpp"
#include "medner/corpus/conll.hpp"
#include "medner/corpus/deid.hpp"
#include "medner/corpus/split.hpp"
#include "medner/corpus/synthetic.hpp"
#include "medner/corpus/vocab.hpp"
#include "medner/error.hpp"
#include "medner/eval/comparison.hpp"
#include "medner/eval/evaluate.hpp"
#include "medner/training/train_log.hpp"
#include "medner/training/trainer.hpp"
#include "medner/util/atomic_file.hpp"

namespace medner::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "prepare_manifest.json";

struct Io {
  std::ostream& out;
  std::ostream& err;
  void warn(const std::string& msg) const { err << "warning: " << msg << '\n'; }
};

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? sep : "") + items[i];
  return s;
}

bool has_records(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    const bool comment = line == "#" || line.starts_with("# ");
    if (!blank && !comment) return true;
    pos = end + 1;
  }
  return false;
}

/// Like read_conll_file, but a file holding no records yields an empty
/// corpus (prepare writes empty partitions for tiny inputs).
Corpus read_partition(const fs::path& path) {
  if (!fs::exists(path)) throw FormatError("corpus file not found: " + path.string());
  const auto text = read_text_file(path);
  if (!has_records(text)) return {};
  return read_conll_file(path);
}

Corpus deidentify_corpus(const Corpus& corpus) {
  std::vector<LabeledRecord> records;
  records.reserve(corpus.size());
  for (const auto& r : corpus.records) records.push_back(deidentify(r));
  return make_corpus(std::move(records), corpus.label_inventory);
}

std::optional<RunConfig> maybe_config(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_run_config(path);
}

std::vector<std::string> inventory_union(std::initializer_list<const Corpus*> parts) {
  std::vector<std::string> types;
  for (const auto* c : parts) types.insert(types.end(), c->label_inventory.begin(), c->label_inventory.end());
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return types;
}

// ---------------------------------------------------------------- gen-synthetic

struct GenOptions {
  std::string config;
  std::string out;
  std::size_t records = 0;
  std::string entity_types;
  std::size_t vocab_size = 0;
  std::size_t max_len = 0;
  double phi_rate = 0.0;
  std::uint64_t seed = 0;
};

int cmd_gen_synthetic(const GenOptions& o, const CLI::App& sub, const Io& io) {
  const auto config = maybe_config(o.config);
  SyntheticSpec spec = config && config->synthetic ? *config->synthetic : SyntheticSpec{};
  if (sub.count("--records")) spec.n_records = o.records;
  if (sub.count("--vocab-size")) spec.vocab_size = o.vocab_size;
  if (sub.count("--max-len")) spec.max_len = o.max_len;
  if (sub.count("--phi-rate")) spec.phi_rate = o.phi_rate;
  if (sub.count("--entity-types")) {
    spec.entity_types.clear();
    std::stringstream in(o.entity_types);
    for (std::string t; std::getline(in, t, ',');) {
      if (!t.empty()) spec.entity_types.push_back(t);
    }
  }
  std::optional<std::uint64_t> config_seed;
  if (config) config_seed = config->synthetic_seed ? config->synthetic_seed : config->seed;
  spec.seed = resolve_seed(sub.count("--seed") ? std::optional(o.seed) : std::nullopt, config_seed);

  const auto corpus = gen_synthetic(spec);
  const std::vector<std::string> header = {
      "medner synthetic corpus",
      "records=" + std::to_string(spec.n_records) + " entity_types=" + join(spec.entity_types, ",") +
          " vocab_size=" + std::to_string(spec.vocab_size) + " max_len=" + std::to_string(spec.max_len) +
          " seed=" + std::to_string(spec.seed),
  };
  const auto text = write_conll(corpus, header);
  if (o.out.empty()) {
    io.out << text;
  } else {
    write_file_atomic(o.out, text);
    io.out << "wrote " << corpus.size() << " records (" << corpus.token_count() << " tokens) to " << o.out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- prepare

struct PrepareOptions {
  std::string config;
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  bool repair = false;
};

int cmd_prepare(const PrepareOptions& o, const CLI::App& sub, const Io& io) {
  const auto config = maybe_config(o.config);
  const RunConfig rc = config.value_or(RunConfig{});
  const auto seed = resolve_seed(sub.count("--seed") ? std::optional(o.seed) : std::nullopt, rc.seed);

  Corpus raw;
  json source;
  if (!o.input.empty() || rc.corpus) {
    const fs::path path = o.input.empty() ? *rc.corpus : fs::path(o.input);
    if (!fs::exists(path)) throw FormatError("corpus file not found: " + path.string());
    raw = read_conll_file(path);
    source = {{"kind", "file"}, {"name", path.filename().string()}};
  } else if (rc.synthetic) {
    SyntheticSpec spec = *rc.synthetic;
    spec.seed = rc.synthetic_seed.value_or(seed);
    raw = gen_synthetic(spec);
    source = {{"kind", "synthetic"},          {"records", spec.n_records}, {"entity_types", spec.entity_types},
              {"vocab_size", spec.vocab_size}, {"max_len", spec.max_len},   {"phi_rate", spec.phi_rate},
              {"seed", spec.seed}};
  } else {
    throw ConfigError("prepare needs an input corpus (positional INPUT, [data] corpus or a [synthetic] section)");
  }

  std::vector<LabeledRecord> cleaned;
  cleaned.reserve(raw.size());
  std::size_t repaired = 0;
  for (const auto& r : raw.records) {
    auto rec = deidentify(r);
    try {
      auto fixed = validate_bio(rec.labels, o.repair ? BioMode::repair : BioMode::strict);
      if (fixed != rec.labels) ++repaired;
      rec.labels = std::move(fixed);
    } catch (const BioError& e) {
      throw FormatError("record '" + r.record_id + "': " + e.what() + " (rerun with --repair to fix)");
    }
    cleaned.push_back(std::move(rec));
  }
  if (repaired) io.warn("repaired BIO tags in " + std::to_string(repaired) + " record(s)");
  const auto corpus = make_corpus(std::move(cleaned), raw.label_inventory);

  SplitSpec spec = rc.split;
  spec.seed = seed;
  const auto parts = split(corpus, spec);
  for (const auto& w : parts.warnings) io.warn(w);
  const auto vocab = build_vocab(parts.train, rc.min_freq, rc.max_vocab);

  const fs::path dir = o.out.empty() ? rc.data_dir() : fs::path(o.out);
  const std::string seed_note = "seed=" + std::to_string(seed);
  write_file_atomic(dir / "train.conll", write_conll(parts.train, {"medner prepare: train split", seed_note}));
  write_file_atomic(dir / "val.conll", write_conll(parts.val, {"medner prepare: val split", seed_note}));
  write_file_atomic(dir / "test.conll", write_conll(parts.test, {"medner prepare: test split", seed_note}));
  write_file_atomic(dir / "vocab.txt", write_vocab(vocab));

  const json manifest = {
      {"seed", seed},
      {"source", source},
      {"fractions", {{"train", spec.train_frac}, {"val", spec.val_frac}, {"test", spec.test_frac}}},
      {"sizes", {{"train", parts.train.size()}, {"val", parts.val.size()}, {"test", parts.test.size()}}},
      {"bio_mode", o.repair ? "repair" : "strict"},
      {"repaired_records", repaired},
      {"vocab", {{"min_freq", rc.min_freq}, {"max_size", rc.max_vocab}, {"size", vocab.size()}}},
      {"entity_types", corpus.label_inventory},
  };
  write_file_atomic(dir / kManifestName, manifest.dump(2) + "\n");

  io.out << "prepared " << corpus.size() << " records: train " << parts.train.size() << ", val "
         << parts.val.size() << ", test " << parts.test.size() << "; vocabulary " << vocab.size() << " -> "
         << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::string precision;
  std::size_t epochs = 0;
};

template <class T>
void run_training(const TrainData& data, const ModelConfig& model, const TrainConfig& tc, const fs::path& dir,
                  const Io& io) {
  TrainHooks hooks;
  hooks.output_dir = dir;
  hooks.on_warning = [&](const std::string& w) { io.warn(w); };
  hooks.on_epoch = [&](const TrainLogRow& row) {
    char line[256];
    std::snprintf(line, sizeof line, "epoch %zu/%zu  train_loss %.6f  val_loss %.6f  val_span_f1 %.4f  lr %.3g",
                  row.epoch, tc.max_epochs, row.train_loss, row.val_loss, row.val_span_f1, row.learning_rate);
    io.out << line << std::endl;
  };
  const auto result = train<T>(data, model, tc, hooks);
  io.out << "best epoch " << result.best_epoch << "; wrote final.ckpt, best.ckpt and trainlog.csv to "
         << dir.string() << '\n';
}

int cmd_train(const TrainOptions& o, const CLI::App& sub, const Io& io) {
  RunConfig rc = load_run_config(o.config);
  const auto seed = resolve_seed(sub.count("--seed") ? std::optional(o.seed) : std::nullopt, rc.seed);
  if (!o.precision.empty()) {
    try {
      rc.precision = parse_precision(o.precision);
    } catch (const FormatError&) {
      throw ConfigError("--precision must be 32 or 64");
    }
  }
  if (sub.count("--epochs")) rc.train.max_epochs = o.epochs;

  const fs::path vocab_path = rc.vocab_file();
  if (!fs::exists(vocab_path)) {
    throw FormatError("vocabulary file not found: " + vocab_path.string() + " (run `medner prepare` first)");
  }
  const auto vocab = parse_vocab(read_text_file(vocab_path));
  const auto train_corpus = read_partition(rc.train_file());
  if (train_corpus.size() == 0) throw FormatError("training corpus " + rc.train_file().string() + " has no records");
  const auto val_corpus = fs::exists(rc.val_file()) ? read_partition(rc.val_file()) : Corpus{};

  std::vector<std::string> types = inventory_union({&train_corpus, &val_corpus});
  const fs::path manifest_path = vocab_path.parent_path() / kManifestName;
  if (fs::exists(manifest_path)) {
    try {
      const auto m = json::parse(read_text_file(manifest_path));
      for (const auto& t : m.at("entity_types").get<std::vector<std::string>>()) {
        if (!std::binary_search(types.begin(), types.end(), t)) types.insert(std::upper_bound(types.begin(), types.end(), t), t);
      }
    } catch (const json::exception& e) {
      throw FormatError(manifest_path.string() + ": " + e.what());
    }
  }

  TrainData data;
  data.labels = LabelIndex(types);
  data.vocab = vocab;
  data.train = encode_corpus(train_corpus, vocab, data.labels);
  data.val = encode_corpus(val_corpus, vocab, data.labels);

  ModelConfig model = rc.model;
  model.vocab_size = vocab.size();
  model.n_labels = data.labels.size();
  TrainConfig tc = rc.train;
  tc.seed = seed;

  const fs::path dir = o.out.empty() ? rc.model_dir() : fs::path(o.out);
  const json manifest = {
      {"seed", seed},
      {"precision", precision_tag(rc.precision)},
      {"model", model},
      {"train",
       {{"learning_rate", tc.learning_rate},
        {"batch_size", tc.batch_size},
        {"max_epochs", tc.max_epochs},
        {"decay_factor", tc.decay.factor},
        {"decay_patience", tc.decay.patience},
        {"min_lr", tc.decay.min_lr},
        {"grad_clip_norm", tc.grad_clip_norm ? json(*tc.grad_clip_norm) : json(nullptr)},
        {"early_stop_patience", tc.early_stop_patience ? json(*tc.early_stop_patience) : json(nullptr)}}},
      {"records", {{"train", data.train.size()}, {"val", data.val.size()}}},
  };
  write_file_atomic(dir / "train_manifest.json", manifest.dump(2) + "\n");

  io.out << "training " << data.train.size() << " records (val " << data.val.size() << "), "
         << precision_tag(rc.precision) << ", seed " << seed << '\n';
  if (rc.precision == Precision::f64) {
    run_training<double>(data, model, tc, dir, io);
  } else {
    run_training<float>(data, model, tc, dir, io);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval / predict

template <class T>
EvalReport evaluate_with(const std::string& bytes, const Corpus& corpus) {
  const auto ck = decode_checkpoint<T>(bytes);
  return evaluate(ck, corpus);
}

std::string load_checkpoint_bytes(const fs::path& path) {
  if (!fs::exists(path)) throw FormatError("checkpoint not found: " + path.string());
  return read_text_file(path);
}

struct EvalOptions {
  std::string config;
  std::string checkpoint;
  std::string corpus;
  std::string out;
  bool gold_as_pred = false;
};

int cmd_eval(const EvalOptions& o, const Io& io) {
  const auto config = maybe_config(o.config);
  fs::path ckpt_path = o.checkpoint;
  fs::path corpus_path = o.corpus;
  std::optional<fs::path> out_dir;
  if (!o.out.empty()) out_dir = o.out;
  if (config) {
    if (ckpt_path.empty()) ckpt_path = config->model_dir() / "best.ckpt";
    if (corpus_path.empty()) corpus_path = config->test_file();
    if (!out_dir) out_dir = config->eval_dir();
  }
  if (corpus_path.empty() || (ckpt_path.empty() && !o.gold_as_pred)) {
    throw ConfigError("eval needs CHECKPOINT and CORPUS (or --config)");
  }

  const auto corpus = deidentify_corpus(read_partition(corpus_path));
  if (corpus.size() == 0) throw FormatError("evaluation corpus " + corpus_path.string() + " has no records");

  EvalReport report;
  if (o.gold_as_pred) {
    LabelSequences gold;
    for (const auto& r : corpus.records) gold.push_back(r.labels);
    LabelIndex labels(corpus.label_inventory);
    if (!ckpt_path.empty() && fs::exists(ckpt_path)) {
      const auto bytes = load_checkpoint_bytes(ckpt_path);
      const auto meta = checkpoint_precision(bytes) == Precision::f64 ? decode_checkpoint<double>(bytes).meta
                                                                       : decode_checkpoint<float>(bytes).meta;
      labels = LabelIndex::from_tags(meta.labels);
      check_inventory(labels, corpus);
    }
    report = evaluate_predictions(corpus, gold, labels);
  } else {
    const auto bytes = load_checkpoint_bytes(ckpt_path);
    report = checkpoint_precision(bytes) == Precision::f64 ? evaluate_with<double>(bytes, corpus)
                                                           : evaluate_with<float>(bytes, corpus);
  }

  if (out_dir) write_file_atomic(*out_dir / "eval_report.txt", write_eval_report(report));
  const auto& m = report.spans.micro;
  io.out << "span P/R/F1 (exact match, micro): " << format_percent(100.0 * m.precision()) << '/'
         << format_percent(100.0 * m.recall()) << '/' << format_percent(100.0 * m.f1()) << '\n';
  io.out << "token P/R/F1 (micro, excluding O): " << format_percent(100.0 * report.tokens.micro.precision()) << '/'
         << format_percent(100.0 * report.tokens.micro.recall()) << '/'
         << format_percent(100.0 * report.tokens.micro.f1()) << '\n';
  io.out << "records " << report.n_records << ", tokens " << report.n_tokens << ", gold spans "
         << report.spans.gold_spans << ", predicted spans " << report.spans.pred_spans << '\n';
  if (out_dir) io.out << "report written to " << (*out_dir / "eval_report.txt").string() << '\n';
  return kExitOk;
}

struct PredictOptions {
  std::string checkpoint;
  std::string input;
  std::string out;
};

int cmd_predict(const PredictOptions& o, const Io& io) {
  const auto bytes = load_checkpoint_bytes(o.checkpoint);
  if (!fs::exists(o.input)) throw FormatError("input file not found: " + o.input);
  std::vector<std::vector<std::string>> blocks;
  try {
    blocks = parse_token_blocks(read_text_file(o.input));
  } catch (const FormatError& e) {
    throw FormatError(o.input + ": " + e.what());
  }
  std::vector<std::vector<std::string>> model_input = blocks;
  for (auto& b : model_input) {
    for (auto& t : b) t = deidentify_token(t);
  }
  const auto tags = checkpoint_precision(bytes) == Precision::f64
                        ? predict_tags(decode_checkpoint<double>(bytes), model_input)
                        : predict_tags(decode_checkpoint<float>(bytes), model_input);

  std::vector<LabeledRecord> records;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%06zu", i + 1);
    records.push_back({id, blocks[i], tags[i]});
  }
  const auto text = write_conll(make_corpus(std::move(records)), {"medner predictions"});
  if (o.out.empty()) {
    io.out << text;
  } else {
    write_file_atomic(o.out, text);
    io.out << "wrote predictions for " << blocks.size() << " record(s) to " << o.out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareOptions {
  std::string results;
  std::string out;
  bool sort = false;
};

int cmd_compare(const CompareOptions& o, const Io& io) {
  if (!fs::exists(o.results)) throw FormatError("results file not found: " + o.results);
  std::vector<ComparisonRow> rows;
  try {
    rows = parse_comparison_rows(read_text_file(o.results));
  } catch (const FormatError& e) {
    throw FormatError(o.results + ": " + e.what());
  }
  if (rows.empty()) throw FormatError(o.results + ": no result rows");
  if (o.sort) sort_by_f1(rows);
  const auto table = render_comparison(rows);
  if (o.out.empty()) {
    io.out << table;
  } else {
    write_file_atomic(o.out, table);
    io.out << "wrote " << rows.size() << "-row table to " << o.out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Io io{out, err};
  CLI::App app{"Clinical named-entity recognition: corpus preparation, training and evaluation", "medner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "medner 0.1.0");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a seeded synthetic labeled corpus");
  gen_cmd->add_option("--config", gen.config, "INI config; its [synthetic] section supplies defaults");
  gen_cmd->add_option("--out", gen.out, "Output corpus file (stdout when omitted)");
  gen_cmd->add_option("--records", gen.records, "Number of records");
  gen_cmd->add_option("--entity-types", gen.entity_types, "Comma-separated entity types");
  gen_cmd->add_option("--vocab-size", gen.vocab_size, "Word inventory size (>= 20)");
  gen_cmd->add_option("--max-len", gen.max_len, "Maximum record length");
  gen_cmd->add_option("--phi-rate", gen.phi_rate, "Share of filler slots holding PHI-shaped tokens");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");

  PrepareOptions prep;
  auto* prep_cmd = app.add_subcommand("prepare", "De-identify, validate, split and build the vocabulary");
  prep_cmd->add_option("input", prep.input, "Labeled corpus file");
  prep_cmd->add_option("--config", prep.config, "INI config");
  prep_cmd->add_option("--out", prep.out, "Output directory");
  prep_cmd->add_option("--seed", prep.seed, "Split seed");
  prep_cmd->add_flag("--repair", prep.repair, "Rewrite dangling I- tags as B- instead of failing");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the encoder on a prepared corpus");
  train_cmd->add_option("--config", tr.config, "INI config")->required();
  train_cmd->add_option("--out", tr.out, "Output directory for checkpoints and trainlog.csv");
  train_cmd->add_option("--seed", tr.seed, "Training seed");
  train_cmd->add_option("--precision", tr.precision, "Floating-point precision: 32 or 64");
  train_cmd->add_option("--epochs", tr.epochs, "Override [train] max_epochs");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a labeled corpus");
  eval_cmd->add_option("checkpoint", ev.checkpoint, "Checkpoint file");
  eval_cmd->add_option("corpus", ev.corpus, "Labeled corpus file");
  eval_cmd->add_option("--config", ev.config, "INI config (defaults: best.ckpt and the test split)");
  eval_cmd->add_option("--out", ev.out, "Directory for eval_report.txt");
  eval_cmd->add_flag("--gold-as-pred", ev.gold_as_pred, "Score the gold labels against themselves");

  PredictOptions pr;
  auto* pred_cmd = app.add_subcommand("predict", "Tag unlabeled token blocks");
  pred_cmd->add_option("checkpoint", pr.checkpoint, "Checkpoint file")->required();
  pred_cmd->add_option("input", pr.input, "One token per line, blank line between records")->required();
  pred_cmd->add_option("--out", pr.out, "Output file (stdout when omitted)");

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Render a model comparison table");
  cmp_cmd->add_option("results", cmp.results, "CSV rows: name,precision_pct,f1_pct")->required();
  cmp_cmd->add_option("--out", cmp.out, "Output file (stdout when omitted)");
  cmp_cmd->add_flag("--sort", cmp.sort, "Sort rows by F1, best first");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_synthetic(gen, *gen_cmd, io);
    if (*prep_cmd) return cmd_prepare(prep, *prep_cmd, io);
    if (*train_cmd) return cmd_train(tr, *train_cmd, io);
    if (*eval_cmd) return cmd_eval(ev, io);
    if (*pred_cmd) return cmd_predict(pr, io);
    if (*cmp_cmd) return cmd_compare(cmp, io);
  } catch (const ConfigError& e) {
    err << "medner: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "medner: error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "medner: error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "medner: error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "medner: unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
  return kExitUsage;
}

}  // namespace medner::cli
