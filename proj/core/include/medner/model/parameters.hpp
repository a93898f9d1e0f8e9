#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medner/model/config.hpp"
#include "medner/model/tensor.hpp"

namespace medner {

struct TensorSpec {
  std::string name;
  Shape shape;
};

/// Canonical tensor names and shapes, in storage order, for a config.
std::vector<TensorSpec> parameter_manifest(const ModelConfig& config);

/// Name of the per-layer tensor `suffix` in layer `layer`, e.g. enc.0.attn.wq.
std::string layer_tensor_name(std::size_t layer, std::string_view suffix);

/// True for tensors the optimizer updates. Positional embeddings are fixed.
bool is_trainable(std::string_view name);

/// Named-tensor store with a fixed insertion order.
template <class T>
class Parameters {
 public:
  using Entry = std::pair<std::string, Tensor<T>>;

  Parameters() = default;

  /// Every tensor of `config`'s manifest, zero-filled.
  static Parameters zeros(const ModelConfig& config) {
    Parameters p;
    for (auto& spec : parameter_manifest(config)) p.add(std::move(spec.name), Tensor<T>(std::move(spec.shape)));
    return p;
  }

  /// Same names and shapes as `other`, zero-filled.
  template <class U>
  static Parameters zeros_like(const Parameters<U>& other) {
    Parameters p;
    for (const auto& [name, t] : other.entries()) p.add(name, Tensor<T>(t.shape));
    return p;
  }

  void add(std::string name, Tensor<T> tensor) {
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), std::move(tensor));
  }

  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  Tensor<T>& at(std::string_view name) { return entries_[lookup(name)].second; }
  const Tensor<T>& at(std::string_view name) const { return entries_[lookup(name)].second; }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t tensor_count() const { return entries_.size(); }
  std::size_t value_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.second.size();
    return n;
  }

  friend bool operator==(const Parameters& a, const Parameters& b) { return a.entries_ == b.entries_; }

 private:
  std::size_t lookup(std::string_view name) const;

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

extern template class Parameters<float>;
extern template class Parameters<double>;

}  // namespace medner
