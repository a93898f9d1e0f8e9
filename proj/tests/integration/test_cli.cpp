#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "medner/cli/app.hpp"
#include "medner/cli/run_config.hpp"
#include "medner/corpus/bio.hpp"
#include "medner/corpus/conll.hpp"
#include "medner/corpus/synthetic.hpp"
#include "medner/error.hpp"
#include "medner/training/train_log.hpp"
#include "medner/util/atomic_file.hpp"

using namespace medner;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult medner_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("medner_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

/// The bundled quickstart config with its output redirected into `dir`.
fs::path quickstart_config(const fs::path& dir) {
  std::string text = slurp(fs::path(MEDNER_SOURCE_DIR) / "configs" / "quickstart.ini");
  const auto pos = text.find("dir = ../runs/quickstart");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("dir = ../runs/quickstart").size(), "dir = run");
  write_file_atomic(dir / "quickstart.ini", text);
  return dir / "quickstart.ini";
}

std::string tiny_config(const std::string& learning_rate = "0.01") {
  return "[run]\nseed = 3\n[synthetic]\nrecords = 60\nvocab_size = 40\nmax_len = 8\n"
         "[model]\nd_model = 8\nn_heads = 2\nn_layers = 1\nd_ff = 8\nmax_len = 8\ndropout = 0.0\n"
         "[train]\nlearning_rate = " +
         learning_rate + "\nbatch_size = 8\nmax_epochs = 3\n[output]\ndir = run\n";
}

int exit_status(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("gen-synthetic") {
  const auto dir = fresh_dir("gen");
  auto r = medner_cli({"gen-synthetic", "--out", (dir / "a.conll").string()});
  REQUIRE(r.code == 0);
  const auto corpus = read_conll_file(dir / "a.conll");
  CHECK(corpus.size() == SyntheticSpec{}.n_records);
  for (const auto& rec : corpus.records) CHECK_NOTHROW(validate_bio(rec.labels, BioMode::strict));

  r = medner_cli({"gen-synthetic", "--seed", "7", "--records", "50", "--out", (dir / "b.conll").string()});
  REQUIRE(r.code == 0);
  r = medner_cli({"gen-synthetic", "--seed", "7", "--records", "50", "--out", (dir / "c.conll").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "b.conll") == slurp(dir / "c.conll"));
  CHECK(slurp(dir / "b.conll").find("seed=7") != std::string::npos);

  r = medner_cli({"gen-synthetic", "--entity-types", "Disease,Drug,Symptom", "--records", "200"});
  REQUIRE(r.code == 0);
  CHECK(parse_conll(r.out).label_inventory == std::vector<std::string>{"Disease", "Drug", "Symptom"});

  CHECK(medner_cli({"gen-synthetic", "--vocab-size", "5"}).code == cli::kExitUsage);
}

TEST_CASE("prepare splits 100 records 70/15/15 reproducibly") {
  const auto dir = fresh_dir("prepare");
  REQUIRE(medner_cli({"gen-synthetic", "--records", "100", "--out", (dir / "raw.conll").string()}).code == 0);
  auto r = medner_cli({"prepare", (dir / "raw.conll").string(), "--out", (dir / "a").string(), "--seed", "5"});
  REQUIRE(r.code == 0);
  CHECK(read_conll_file(dir / "a" / "train.conll").size() == 70);
  CHECK(read_conll_file(dir / "a" / "val.conll").size() == 15);
  CHECK(read_conll_file(dir / "a" / "test.conll").size() == 15);
  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "prepare_manifest.json"));
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["fractions"]["train"] == 0.7);

  r = medner_cli({"prepare", (dir / "raw.conll").string(), "--out", (dir / "b").string(), "--seed", "5"});
  REQUIRE(r.code == 0);
  for (const char* f : {"train.conll", "val.conll", "test.conll", "vocab.txt", "prepare_manifest.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("prepare reports the offending line or record") {
  const auto dir = fresh_dir("prepare_errors");
  std::string text;
  for (int i = 1; i <= 16; ++i) text += "w" + std::to_string(i) + "\tO\n";
  text += "bad\tB_Drug\n";
  write_file_atomic(dir / "bad.conll", text);
  auto r = medner_cli({"prepare", (dir / "bad.conll").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("line 17") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));

  write_file_atomic(dir / "dangling.conll", "# id: note-9\na\tO\nb\tI-Drug\n\nc\tO\n\nd\tB-Drug\n");
  r = medner_cli({"prepare", (dir / "dangling.conll").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("note-9") != std::string::npos);
  r = medner_cli({"prepare", (dir / "dangling.conll").string(), "--out", (dir / "out").string(), "--repair"});
  CHECK(r.code == 0);
  CHECK(r.err.find("repaired") != std::string::npos);

  write_file_atomic(dir / "empty.conll", "");
  CHECK(medner_cli({"prepare", (dir / "empty.conll").string()}).code == cli::kExitData);
  CHECK(medner_cli({"prepare", (dir / "missing.conll").string()}).code == cli::kExitData);
}

TEST_CASE("prepare de-identifies tokens") {
  const auto dir = fresh_dir("prepare_deid");
  write_file_atomic(dir / "phi.conll",
                    "seen\tO\n12/03/2019\tO\n\nMRN\tO\n1234567\tO\n\n[**Name**]\tO\nx\tB-Drug\n\ny\tO\n");
  const auto r = medner_cli({"prepare", (dir / "phi.conll").string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  std::string all;
  for (const char* f : {"train.conll", "val.conll", "test.conll"}) all += slurp(dir / "out" / f);
  CHECK(all.find("1234567") == std::string::npos);
  CHECK(all.find("12/03/2019") == std::string::npos);
  CHECK(all.find("[**Name**]") == std::string::npos);
}

TEST_CASE("seed precedence: flag, config, environment") {
  const auto dir = fresh_dir("seeds");
  write_file_atomic(dir / "noseed.ini", "[synthetic]\nrecords = 30\n[output]\ndir = run\n");
  setenv(cli::kSeedEnv, "77", 1);
  REQUIRE(medner_cli({"prepare", "--config", (dir / "noseed.ini").string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "run" / "data" / "prepare_manifest.json"))["seed"] == 77);
  REQUIRE(medner_cli({"prepare", "--config", (dir / "noseed.ini").string(), "--seed", "5"}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "run" / "data" / "prepare_manifest.json"))["seed"] == 5);
  write_file_atomic(dir / "seeded.ini", "[run]\nseed = 9\n[synthetic]\nrecords = 30\n[output]\ndir = run\n");
  REQUIRE(medner_cli({"prepare", "--config", (dir / "seeded.ini").string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "run" / "data" / "prepare_manifest.json"))["seed"] == 9);
  unsetenv(cli::kSeedEnv);
  CHECK(cli::resolve_seed(std::nullopt, std::nullopt) == cli::kDefaultSeed);
}

TEST_CASE("config errors are usage errors") {
  const auto dir = fresh_dir("config_errors");
  write_file_atomic(dir / "typo.ini", "[train]\nlearnin_rate = 0.1\n");
  auto r = medner_cli({"train", "--config", (dir / "typo.ini").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("learnin_rate") != std::string::npos);
  write_file_atomic(dir / "bad.ini", "[model]\nd_model = many\n");
  CHECK(medner_cli({"train", "--config", (dir / "bad.ini").string()}).code == cli::kExitUsage);
  CHECK(medner_cli({"train", "--config", (dir / "absent.ini").string()}).code == cli::kExitUsage);
  CHECK(medner_cli({"train"}).code == cli::kExitUsage);
  CHECK(medner_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(medner_cli({}).code == cli::kExitUsage);
  CHECK(medner_cli({"--help"}).code == 0);

  const auto rc = cli::parse_run_config("[data]\ntrain = t.conll\n[output]\ndir = /abs/out\n", "/base");
  CHECK(rc.train_file() == fs::path("/base/t.conll"));
  CHECK(rc.output_dir == fs::path("/abs/out"));
  CHECK(rc.vocab_file() == fs::path("/abs/out/data/vocab.txt"));
}

TEST_CASE("train needs a prepared vocabulary") {
  const auto dir = fresh_dir("train_missing");
  write_file_atomic(dir / "c.ini", tiny_config());
  const auto r = medner_cli({"train", "--config", (dir / "c.ini").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("vocabulary file not found") != std::string::npos);
  CHECK(r.err.find("medner prepare") != std::string::npos);
}

TEST_CASE("tiny pipeline: train, eval, predict and determinism") {
  const auto dir = fresh_dir("pipeline");
  write_file_atomic(dir / "c.ini", tiny_config());
  const auto cfg = (dir / "c.ini").string();
  REQUIRE(medner_cli({"prepare", "--config", cfg}).code == 0);
  auto r = medner_cli({"train", "--config", cfg});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("epoch 3/3") != std::string::npos);
  for (const char* f : {"final.ckpt", "best.ckpt", "trainlog.csv", "train_manifest.json"}) {
    CHECK(fs::exists(dir / "run" / "model" / f));
  }
  CHECK(slurp(dir / "run" / "model" / "trainlog.csv").starts_with("epoch,train_loss,val_loss,val_span_f1,lr\n"));

  r = medner_cli({"train", "--config", cfg, "--out", (dir / "again").string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"final.ckpt", "best.ckpt", "trainlog.csv"}) {
    CHECK(slurp(dir / "run" / "model" / f) == slurp(dir / "again" / f));
  }

  r = medner_cli({"train", "--config", cfg, "--out", (dir / "f64").string(), "--precision", "64"});
  REQUIRE(r.code == 0);
  CHECK(medner_cli({"train", "--config", cfg, "--precision", "16"}).code == cli::kExitUsage);

  r = medner_cli({"eval", "--config", cfg});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("span P/R/F1") != std::string::npos);
  CHECK(fs::exists(dir / "run" / "eval" / "eval_report.txt"));
  r = medner_cli({"eval", (dir / "f64" / "best.ckpt").string(), (dir / "run" / "data" / "test.conll").string()});
  CHECK(r.code == 0);

  r = medner_cli({"eval", "--config", cfg, "--gold-as-pred"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("100.0/100.0/100.0") != std::string::npos);

  write_file_atomic(dir / "other.conll", "a\tB-Surgery\nb\tO\n");
  r = medner_cli({"eval", (dir / "run" / "model" / "best.ckpt").string(), (dir / "other.conll").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("Surgery") != std::string::npos);

  std::string unlabeled;
  for (const auto& rec : read_conll_file(dir / "run" / "data" / "test.conll").records) {
    for (const auto& t : rec.tokens) unlabeled += t + "\n";
    unlabeled += "\n";
  }
  unlabeled += "unseenword\n1234567\n";
  write_file_atomic(dir / "tokens.txt", unlabeled);
  r = medner_cli({"predict", (dir / "run" / "model" / "best.ckpt").string(), (dir / "tokens.txt").string(), "--out",
                  (dir / "pred.conll").string()});
  REQUIRE(r.code == 0);
  const auto predicted = read_conll_file(dir / "pred.conll");
  CHECK(predicted.records.back().tokens == std::vector<std::string>{"unseenword", "1234567"});
  for (const auto& rec : predicted.records) CHECK_NOTHROW(validate_bio(rec.labels, BioMode::strict));
  r = medner_cli({"predict", (dir / "run" / "model" / "best.ckpt").string(), (dir / "tokens.txt").string()});
  CHECK(parse_conll(r.out) == predicted);
}

TEST_CASE("divergence exits with the numerical code and keeps a checkpoint") {
  const auto dir = fresh_dir("diverge");
  write_file_atomic(dir / "c.ini", tiny_config("1e300"));
  const auto cfg = (dir / "c.ini").string();
  REQUIRE(medner_cli({"prepare", "--config", cfg}).code == 0);
  const auto r = medner_cli({"train", "--config", cfg});
  CHECK(r.code == cli::kExitNumerical);
  CHECK(r.err.find("diverged") != std::string::npos);
  CHECK(fs::exists(dir / "run" / "model" / "final.ckpt"));
}

TEST_CASE("compare renders and sorts the baseline rows") {
  const auto rows = fs::path(MEDNER_SOURCE_DIR) / "tests" / "data" / "baseline_models.csv";
  auto r = medner_cli({"compare", rows.string(), "--sort"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, rule, first;
  std::getline(lines, header);
  std::getline(lines, rule);
  std::getline(lines, first);
  CHECK(header == "Model | Precision% | F1-score");
  CHECK(first == "BioBert | 89.8 | 87.6");

  r = medner_cli({"compare", rows.string()});
  CHECK(r.out.find("\nBert | 82.5 | 81.0\n") != std::string::npos);

  const auto dir = fresh_dir("compare");
  write_file_atomic(dir / "empty.csv", "");
  CHECK(medner_cli({"compare", (dir / "empty.csv").string()}).code == cli::kExitData);
}

TEST_CASE("the installed binary maps errors to exit codes") {
  const auto dir = fresh_dir("binary");
  write_file_atomic(dir / "empty.csv", "");
  const std::string exe = MEDNER_EXE;
  const std::string quiet = " >/dev/null 2>&1";
  CHECK(exit_status(exe + " compare " + (dir / "empty.csv").string() + quiet) == 3);
  CHECK(exit_status(exe + " no-such-command" + quiet) == 2);
  CHECK(exit_status(exe + " compare " + (fs::path(MEDNER_SOURCE_DIR) / "tests/data/baseline_models.csv").string() +
                    quiet) == 0);
}

TEST_CASE("quickstart trains end to end with a falling loss") {
  const auto dir = fresh_dir("quickstart");
  const auto cfg = quickstart_config(dir).string();
  REQUIRE(medner_cli({"prepare", "--config", cfg}).code == 0);
  REQUIRE(medner_cli({"train", "--config", cfg}).code == 0);
  const auto r = medner_cli({"eval", "--config", cfg});
  REQUIRE(r.code == 0);
  const auto log = parse_trainlog_csv(slurp(dir / "run" / "model" / "trainlog.csv"));
  REQUIRE(log.size() >= 10);
  CHECK(log.back().train_loss < log.front().train_loss);
}
