#include "medner/model/config.hpp"

#include <nlohmann/json.hpp>

#include "medner/error.hpp"

namespace medner {

void ModelConfig::validate() const {
  if (vocab_size < 1 || d_model < 1 || n_heads < 1 || n_layers < 1 || d_ff < 1 || max_len < 1 || n_labels < 1) {
    throw ConfigError("model sizes must all be at least 1");
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("d_model (" + std::to_string(d_model) + ") must be divisible by n_heads (" +
                      std::to_string(n_heads) + ")");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must lie in [0, 1)");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"vocab_size", c.vocab_size}, {"d_model", c.d_model},   {"n_heads", c.n_heads},
                     {"n_layers", c.n_layers},     {"d_ff", c.d_ff},         {"max_len", c.max_len},
                     {"n_labels", c.n_labels},     {"dropout_rate", c.dropout_rate}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("vocab_size").get_to(c.vocab_size);
  j.at("d_model").get_to(c.d_model);
  j.at("n_heads").get_to(c.n_heads);
  j.at("n_layers").get_to(c.n_layers);
  j.at("d_ff").get_to(c.d_ff);
  j.at("max_len").get_to(c.max_len);
  j.at("n_labels").get_to(c.n_labels);
  j.at("dropout_rate").get_to(c.dropout_rate);
}

}  // namespace medner
