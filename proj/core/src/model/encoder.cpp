#include "medner/model/encoder.hpp"

#include <cmath>
#include <string>

#include "../kernels.hpp"
#include "medner/error.hpp"
#include "medner/rng.hpp"

namespace medner {

TokenBatch TokenBatch::from_sequences(std::span<const std::vector<std::int32_t>> sequences) {
  TokenBatch b;
  b.batch = sequences.size();
  for (const auto& s : sequences) b.length = std::max(b.length, s.size());
  b.token_ids.assign(b.batch * b.length, 0);
  b.mask.assign(b.batch * b.length, 0);
  for (std::size_t i = 0; i < b.batch; ++i) {
    for (std::size_t t = 0; t < sequences[i].size(); ++t) {
      b.token_ids[i * b.length + t] = sequences[i][t];
      b.mask[i * b.length + t] = 1;
    }
  }
  return b;
}

namespace {

template <class T>
class DropoutSampler {
 public:
  DropoutSampler(bool enabled, double rate, std::uint64_t seed)
      : active_(enabled && rate > 0.0), rate_(rate), keep_scale_(static_cast<T>(1.0 / (1.0 - rate))), rng_(seed) {}

  bool active() const { return active_; }

  /// Fills `scale` with 0 or 1/(1-rate) per entry.
  void sample(Tensor<T>& scale) {
    for (auto& s : scale.values) s = rng_.bernoulli(rate_) ? T(0) : keep_scale_;
  }

 private:
  bool active_;
  double rate_;
  T keep_scale_;
  Rng rng_;
};

template <class T>
LayerTrace<T> encoder_layer(const Parameters<T>& p, const ModelConfig& c, std::size_t layer, Tensor<T> x,
                            std::span<const std::uint8_t> mask, DropoutSampler<T>& dropout) {
  const std::size_t n = x.dim(0);
  const std::size_t d = c.d_model;
  const std::size_t heads = c.n_heads;
  const std::size_t dk = c.head_dim();
  const std::size_t ff = c.d_ff;
  auto w = [&](const char* suffix) -> const T* { return p.at(layer_tensor_name(layer, suffix)).data(); };

  LayerTrace<T> L;
  L.input = std::move(x);

  L.ln1_hat = Tensor<T>({n, d});
  L.ln1_rstd.resize(n);
  L.ln1_out = Tensor<T>({n, d});
  detail::layer_norm(L.input.data(), n, d, w("ln1.g"), w("ln1.b"), kLayerNormEpsilon, L.ln1_hat.data(),
                     L.ln1_rstd.data(), L.ln1_out.data());

  L.q = Tensor<T>({n, d});
  L.k = Tensor<T>({n, d});
  L.v = Tensor<T>({n, d});
  detail::linear(L.ln1_out.data(), n, d, w("attn.wq"), w("attn.bq"), d, L.q.data());
  detail::linear(L.ln1_out.data(), n, d, w("attn.wk"), w("attn.bk"), d, L.k.data());
  detail::linear(L.ln1_out.data(), n, d, w("attn.wv"), w("attn.bv"), d, L.v.data());

  L.probs = Tensor<T>({heads, n, n});
  if (dropout.active()) {
    L.probs_scale = Tensor<T>({heads, n, n});
    dropout.sample(L.probs_scale);
  }
  L.context = Tensor<T>({n, d});
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dk;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<T> row(L.probs.data() + (h * n + i) * n, n);
      const T* qi = L.q.data() + i * d + off;
      for (std::size_t j = 0; j < n; ++j) {
        if (!mask[j]) continue;
        const T* kj = L.k.data() + j * d + off;
        T s = 0;
        for (std::size_t e = 0; e < dk; ++e) s += qi[e] * kj[e];
        row[j] = s * scale;
      }
      masked_softmax_inplace<T>(row, mask);
      T* ci = L.context.data() + i * d + off;
      for (std::size_t j = 0; j < n; ++j) {
        T a = row[j];
        if (dropout.active()) a *= L.probs_scale.values[(h * n + i) * n + j];
        if (a == T(0)) continue;
        const T* vj = L.v.data() + j * d + off;
        for (std::size_t e = 0; e < dk; ++e) ci[e] += a * vj[e];
      }
    }
  }

  L.mid = Tensor<T>({n, d});
  detail::linear(L.context.data(), n, d, w("attn.wo"), w("attn.bo"), d, L.mid.data());
  for (std::size_t i = 0; i < L.mid.size(); ++i) L.mid.values[i] += L.input.values[i];

  L.ln2_hat = Tensor<T>({n, d});
  L.ln2_rstd.resize(n);
  L.ln2_out = Tensor<T>({n, d});
  detail::layer_norm(L.mid.data(), n, d, w("ln2.g"), w("ln2.b"), kLayerNormEpsilon, L.ln2_hat.data(),
                     L.ln2_rstd.data(), L.ln2_out.data());

  L.ff_pre = Tensor<T>({n, ff});
  detail::linear(L.ln2_out.data(), n, d, w("ff.w1"), w("ff.b1"), ff, L.ff_pre.data());
  L.ff_act = Tensor<T>({n, ff});
  for (std::size_t i = 0; i < L.ff_pre.size(); ++i) {
    L.ff_act.values[i] = static_cast<T>(gelu(static_cast<double>(L.ff_pre.values[i])));
  }
  if (dropout.active()) {
    L.ff_scale = Tensor<T>({n, ff});
    dropout.sample(L.ff_scale);
    for (std::size_t i = 0; i < L.ff_act.size(); ++i) L.ff_act.values[i] *= L.ff_scale.values[i];
  }
  return L;
}

}  // namespace

template <class T>
ForwardResult<T> forward(const Parameters<T>& params, const ModelConfig& config, const TokenBatch& batch,
                         const DropoutOptions& dropout) {
  config.validate();
  const std::size_t B = batch.batch;
  const std::size_t n = batch.length;
  const std::size_t d = config.d_model;
  const std::size_t K = config.n_labels;
  if (batch.token_ids.size() != B * n || batch.mask.size() != B * n) throw ConfigError("token batch shape mismatch");
  if (n > config.max_len) {
    throw ConfigError("sequence too long: " + std::to_string(n) + " > max_len " + std::to_string(config.max_len));
  }
  const auto& tok = params.at("emb.tok");
  const auto& pos = params.at("emb.pos");
  if (tok.shape != Shape{config.vocab_size, d} || pos.shape != Shape{config.max_len, d}) {
    throw ConfigError("parameters do not match the model config");
  }

  ForwardResult<T> result;
  result.logits = Tensor<T>({B, n, K});
  auto& trace = result.trace;
  trace.config = config;
  trace.batch = B;
  trace.length = n;
  trace.padded.resize(B * n);
  trace.records.resize(B);

  for (std::size_t b = 0; b < B; ++b) {
    auto& rec = trace.records[b];
    rec.token_ids.assign(batch.token_ids.begin() + static_cast<std::ptrdiff_t>(b * n),
                         batch.token_ids.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
    rec.mask.assign(batch.mask.begin() + static_cast<std::ptrdiff_t>(b * n),
                    batch.mask.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
    for (std::size_t t = 0; t < n; ++t) trace.padded[b * n + t] = rec.mask[t] ? 0 : 1;

    Tensor<T> x({n, d});
    for (std::size_t t = 0; t < n; ++t) {
      const auto id = rec.token_ids[t];
      if (id < 0 || static_cast<std::size_t>(id) >= config.vocab_size) {
        throw ConfigError("token id " + std::to_string(id) + " out of range for vocab_size " +
                          std::to_string(config.vocab_size));
      }
      const auto e = tok.row(static_cast<std::size_t>(id));
      const auto pe = pos.row(t);
      for (std::size_t i = 0; i < d; ++i) x(t, i) = e[i] + pe[i];
    }

    DropoutSampler<T> sampler(dropout.enabled, config.dropout_rate, mix_seed(dropout.seed, b));
    rec.layers.reserve(config.n_layers);
    for (std::size_t l = 0; l < config.n_layers; ++l) {
      rec.layers.push_back(encoder_layer(params, config, l, std::move(x), rec.mask, sampler));
      const auto& L = rec.layers.back();
      x = Tensor<T>({n, d});
      detail::linear(L.ff_act.data(), n, config.d_ff, params.at(layer_tensor_name(l, "ff.w2")).data(),
                     params.at(layer_tensor_name(l, "ff.b2")).data(), d, x.data());
      for (std::size_t i = 0; i < x.size(); ++i) x.values[i] += L.mid.values[i];
    }
    rec.output = std::move(x);
    detail::linear(rec.output.data(), n, d, params.at("head.w").data(), params.at("head.b").data(), K,
                   result.logits.data() + b * n * K);
  }
  return result;
}

template <class T>
std::vector<std::int32_t> predict_labels(const Tensor<T>& logits) {
  const std::size_t K = logits.shape.back();
  const std::size_t rows = K == 0 ? 0 : logits.size() / K;
  std::vector<std::int32_t> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* z = logits.data() + r * K;
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (z[k] > z[best]) best = k;
    }
    out[r] = static_cast<std::int32_t>(best);
  }
  return out;
}

template ForwardResult<float> forward<float>(const Parameters<float>&, const ModelConfig&, const TokenBatch&,
                                             const DropoutOptions&);
template ForwardResult<double> forward<double>(const Parameters<double>&, const ModelConfig&, const TokenBatch&,
                                               const DropoutOptions&);
template std::vector<std::int32_t> predict_labels<float>(const Tensor<float>&);
template std::vector<std::int32_t> predict_labels<double>(const Tensor<double>&);

}  // namespace medner
