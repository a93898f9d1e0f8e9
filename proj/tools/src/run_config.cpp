#include "medner/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "medner/error.hpp"
#include "medner/util/atomic_file.hpp"

namespace medner::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"seed"}},
      {"data", {"corpus", "train", "val", "test", "vocab"}},
      {"synthetic", {"records", "entity_types", "vocab_size", "max_len", "phi_rate", "seed"}},
      {"split", {"train_frac", "val_frac", "test_frac"}},
      {"vocab", {"min_freq", "max_size"}},
      {"model", {"d_model", "n_heads", "n_layers", "d_ff", "max_len", "dropout"}},
      {"train",
       {"learning_rate", "batch_size", "max_epochs", "decay_factor", "decay_patience", "min_lr", "grad_clip_norm",
        "early_stop_patience", "precision"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::filesystem::path base) : tree_(tree), base_(std::move(base)) {}

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'));
    if (!node) return std::nullopt;
    return trim(*node);
  }

  std::optional<std::uint64_t> count(const std::string& section, const std::string& key) const {
    const auto s = text(section, key);
    if (!s) return std::nullopt;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc() || ptr != s->data() + s->size()) fail(section, key, "a non-negative integer");
    return v;
  }

  std::optional<double> real(const std::string& section, const std::string& key) const {
    const auto s = text(section, key);
    if (!s) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(*s, &used);
      if (used != s->size()) fail(section, key, "a number");
      return v;
    } catch (const std::logic_error&) {
      fail(section, key, "a number");
    }
  }

  std::optional<std::filesystem::path> path(const std::string& section, const std::string& key) const {
    const auto s = text(section, key);
    if (!s || s->empty()) return std::nullopt;
    const std::filesystem::path p(*s);
    return p.is_absolute() ? p : (base_ / p).lexically_normal();
  }

  template <class T>
  void set(T& target, const std::optional<T>& value) const {
    if (value) target = *value;
  }

  void set_size(std::size_t& target, const std::string& section, const std::string& key) const {
    if (const auto v = count(section, key)) target = static_cast<std::size_t>(*v);
  }

 private:
  [[noreturn]] static void fail(const std::string& section, const std::string& key, const std::string& what) {
    throw ConfigError("config [" + section + "] " + key + " must be " + what);
  }

  const pt::ptree& tree_;
  std::filesystem::path base_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("config has unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' lies outside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("config [" + section + "] has unknown key '" + key + "'");
    }
  }

  const Reader r(tree, base_dir);
  RunConfig c;
  c.seed = r.count("run", "seed");
  c.corpus = r.path("data", "corpus");
  c.train_path = r.path("data", "train");
  c.val_path = r.path("data", "val");
  c.test_path = r.path("data", "test");
  c.vocab_path = r.path("data", "vocab");

  if (tree.get_child_optional("synthetic")) {
    SyntheticSpec s;
    r.set_size(s.n_records, "synthetic", "records");
    r.set_size(s.vocab_size, "synthetic", "vocab_size");
    r.set_size(s.max_len, "synthetic", "max_len");
    r.set(s.phi_rate, r.real("synthetic", "phi_rate"));
    if (const auto types = r.text("synthetic", "entity_types")) s.entity_types = split_list(*types);
    c.synthetic = s;
    c.synthetic_seed = r.count("synthetic", "seed");
  }

  r.set(c.split.train_frac, r.real("split", "train_frac"));
  r.set(c.split.val_frac, r.real("split", "val_frac"));
  r.set(c.split.test_frac, r.real("split", "test_frac"));
  r.set_size(c.min_freq, "vocab", "min_freq");
  r.set_size(c.max_vocab, "vocab", "max_size");

  r.set_size(c.model.d_model, "model", "d_model");
  r.set_size(c.model.n_heads, "model", "n_heads");
  r.set_size(c.model.n_layers, "model", "n_layers");
  r.set_size(c.model.d_ff, "model", "d_ff");
  r.set_size(c.model.max_len, "model", "max_len");
  r.set(c.model.dropout_rate, r.real("model", "dropout"));

  r.set(c.train.learning_rate, r.real("train", "learning_rate"));
  r.set_size(c.train.batch_size, "train", "batch_size");
  r.set_size(c.train.max_epochs, "train", "max_epochs");
  r.set(c.train.decay.factor, r.real("train", "decay_factor"));
  r.set_size(c.train.decay.patience, "train", "decay_patience");
  r.set(c.train.decay.min_lr, r.real("train", "min_lr"));
  if (const auto v = r.real("train", "grad_clip_norm")) c.train.grad_clip_norm = *v;
  if (const auto v = r.count("train", "early_stop_patience")) c.train.early_stop_patience = *v;
  if (const auto p = r.text("train", "precision")) {
    try {
      c.precision = parse_precision(*p);
    } catch (const FormatError&) {
      throw ConfigError("config [train] precision must be 32 or 64");
    }
  }
  if (const auto dir = r.path("output", "dir")) c.output_dir = *dir;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  const auto base = std::filesystem::absolute(path).parent_path();
  try {
    return parse_run_config(read_text_file(path), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config) {
  if (flag) return *flag;
  if (config) return *config;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(std::string(kSeedEnv) + " must be a non-negative integer");
    }
    return v;
  }
  return kDefaultSeed;
}

}  // namespace medner::cli
