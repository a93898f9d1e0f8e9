#include "medner/model/parameters.hpp"

#include "medner/error.hpp"

namespace medner {

std::string layer_tensor_name(std::size_t layer, std::string_view suffix) {
  return "enc." + std::to_string(layer) + "." + std::string(suffix);
}

bool is_trainable(std::string_view name) { return name != "emb.pos"; }

std::vector<TensorSpec> parameter_manifest(const ModelConfig& c) {
  c.validate();
  const std::size_t d = c.d_model;
  std::vector<TensorSpec> m;
  m.push_back({"emb.tok", {c.vocab_size, d}});
  m.push_back({"emb.pos", {c.max_len, d}});
  for (std::size_t l = 0; l < c.n_layers; ++l) {
    for (const char* w : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"}) m.push_back({layer_tensor_name(l, w), {d, d}});
    for (const char* b : {"attn.bq", "attn.bk", "attn.bv", "attn.bo"}) m.push_back({layer_tensor_name(l, b), {d}});
    for (const char* n : {"ln1.g", "ln1.b", "ln2.g", "ln2.b"}) m.push_back({layer_tensor_name(l, n), {d}});
    m.push_back({layer_tensor_name(l, "ff.w1"), {d, c.d_ff}});
    m.push_back({layer_tensor_name(l, "ff.b1"), {c.d_ff}});
    m.push_back({layer_tensor_name(l, "ff.w2"), {c.d_ff, d}});
    m.push_back({layer_tensor_name(l, "ff.b2"), {d}});
  }
  m.push_back({"head.w", {d, c.n_labels}});
  m.push_back({"head.b", {c.n_labels}});
  return m;
}

template <class T>
std::size_t Parameters<T>::lookup(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter tensor '" + std::string(name) + "'");
  return it->second;
}

template class Parameters<float>;
template class Parameters<double>;

}  // namespace medner
