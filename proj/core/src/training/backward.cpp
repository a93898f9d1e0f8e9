#include "medner/training/backward.hpp"

#include <cmath>

#include "../kernels.hpp"
#include "medner/error.hpp"

namespace medner {

namespace {

template <class T>
void check_trace(const Parameters<T>& params, const ModelConfig& config, const ForwardTrace<T>& trace,
                 const Tensor<T>& dlogits) {
  if (!(trace.config == config)) throw ConfigError("trace was produced with a different model config");
  if (trace.records.size() != trace.batch) throw ConfigError("trace record count mismatch");
  if (dlogits.shape != Shape{trace.batch, trace.length, config.n_labels}) {
    throw ConfigError("dlogits shape does not match the trace");
  }
  for (const auto& spec : parameter_manifest(config)) {
    if (!params.contains(spec.name) || params.at(spec.name).shape != spec.shape) {
      throw ConfigError("parameters do not match the trace config at '" + spec.name + "'");
    }
  }
  for (const auto& rec : trace.records) {
    if (rec.layers.size() != config.n_layers || rec.output.shape != Shape{trace.length, config.d_model}) {
      throw ConfigError("trace does not match the model config");
    }
  }
}

template <class T>
Tensor<T> layer_backward(const Parameters<T>& p, Parameters<T>& g, const ModelConfig& c, std::size_t layer,
                         const LayerTrace<T>& L, const KeyMask& mask, const Tensor<T>& dout) {
  const std::size_t n = dout.dim(0);
  const std::size_t d = c.d_model;
  const std::size_t heads = c.n_heads;
  const std::size_t dk = c.head_dim();
  const std::size_t ff = c.d_ff;
  auto w = [&](const char* s) -> const T* { return p.at(layer_tensor_name(layer, s)).data(); };
  auto gw = [&](const char* s) -> T* { return g.at(layer_tensor_name(layer, s)).data(); };

  // out = mid + ff_act W2 + b2
  Tensor<T> dmid = dout;
  Tensor<T> dact({n, ff});
  detail::linear_backward(L.ff_act.data(), n, ff, w("ff.w2"), d, dout.data(), dact.data(), gw("ff.w2"), gw("ff.b2"));
  for (std::size_t i = 0; i < dact.size(); ++i) {
    T s = dact.values[i] * static_cast<T>(gelu_derivative(static_cast<double>(L.ff_pre.values[i])));
    if (!L.ff_scale.values.empty()) s *= L.ff_scale.values[i];
    dact.values[i] = s;
  }
  Tensor<T> dln2({n, d});
  detail::linear_backward(L.ln2_out.data(), n, d, w("ff.w1"), ff, dact.data(), dln2.data(), gw("ff.w1"),
                          gw("ff.b1"));
  detail::layer_norm_backward(dln2.data(), L.ln2_hat.data(), L.ln2_rstd.data(), w("ln2.g"), n, d, dmid.data(),
                              gw("ln2.g"), gw("ln2.b"));

  // mid = input + context Wo + bo
  Tensor<T> dinput = dmid;
  Tensor<T> dctx({n, d});
  detail::linear_backward(L.context.data(), n, d, w("attn.wo"), d, dmid.data(), dctx.data(), gw("attn.wo"),
                          gw("attn.bo"));

  Tensor<T> dq({n, d});
  Tensor<T> dk_({n, d});
  Tensor<T> dv({n, d});
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));
  const bool dropped = !L.probs_scale.values.empty();
  std::vector<T> dp(n);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dk;
    for (std::size_t i = 0; i < n; ++i) {
      const T* prow = L.probs.data() + (h * n + i) * n;
      const T* srow = dropped ? L.probs_scale.data() + (h * n + i) * n : nullptr;
      const T* dci = dctx.data() + i * d + off;
      T weighted = 0;
      for (std::size_t j = 0; j < n; ++j) {
        dp[j] = 0;
        if (!mask[j]) continue;
        const T* vj = L.v.data() + j * d + off;
        T* dvj = dv.data() + j * d + off;
        const T a = srow ? prow[j] * srow[j] : prow[j];
        T da = 0;
        for (std::size_t e = 0; e < dk; ++e) {
          da += dci[e] * vj[e];
          dvj[e] += a * dci[e];
        }
        dp[j] = srow ? da * srow[j] : da;
        weighted += prow[j] * dp[j];
      }
      const T* qi = L.q.data() + i * d + off;
      T* dqi = dq.data() + i * d + off;
      for (std::size_t j = 0; j < n; ++j) {
        if (!mask[j]) continue;
        const T ds = prow[j] * (dp[j] - weighted) * scale;
        const T* kj = L.k.data() + j * d + off;
        T* dkj = dk_.data() + j * d + off;
        for (std::size_t e = 0; e < dk; ++e) {
          dqi[e] += ds * kj[e];
          dkj[e] += ds * qi[e];
        }
      }
    }
  }

  Tensor<T> dln1({n, d});
  detail::linear_backward(L.ln1_out.data(), n, d, w("attn.wq"), d, dq.data(), dln1.data(), gw("attn.wq"),
                          gw("attn.bq"));
  detail::linear_backward(L.ln1_out.data(), n, d, w("attn.wk"), d, dk_.data(), dln1.data(), gw("attn.wk"),
                          gw("attn.bk"));
  detail::linear_backward(L.ln1_out.data(), n, d, w("attn.wv"), d, dv.data(), dln1.data(), gw("attn.wv"),
                          gw("attn.bv"));
  detail::layer_norm_backward(dln1.data(), L.ln1_hat.data(), L.ln1_rstd.data(), w("ln1.g"), n, d, dinput.data(),
                              gw("ln1.g"), gw("ln1.b"));
  return dinput;
}

}  // namespace

template <class T>
Parameters<T> backward(const Parameters<T>& params, const ModelConfig& config, const ForwardTrace<T>& trace,
                       const Tensor<T>& dlogits) {
  check_trace(params, config, trace, dlogits);
  auto grads = Parameters<T>::zeros(config);
  const std::size_t n = trace.length;
  const std::size_t d = config.d_model;
  const std::size_t K = config.n_labels;
  auto& g_tok = grads.at("emb.tok");
  auto& g_pos = grads.at("emb.pos");

  for (std::size_t b = 0; b < trace.batch; ++b) {
    const auto& rec = trace.records[b];
    Tensor<T> dx({n, d});
    detail::linear_backward(rec.output.data(), n, d, params.at("head.w").data(), K, dlogits.data() + b * n * K,
                            dx.data(), grads.at("head.w").data(), grads.at("head.b").data());
    for (std::size_t l = config.n_layers; l-- > 0;) {
      dx = layer_backward(params, grads, config, l, rec.layers[l], rec.mask, dx);
    }
    for (std::size_t t = 0; t < n; ++t) {
      auto tok_row = g_tok.row(static_cast<std::size_t>(rec.token_ids[t]));
      auto pos_row = g_pos.row(t);
      const auto src = dx.row(t);
      for (std::size_t i = 0; i < d; ++i) {
        tok_row[i] += src[i];
        pos_row[i] += src[i];
      }
    }
  }
  return grads;
}

template Parameters<float> backward<float>(const Parameters<float>&, const ModelConfig&, const ForwardTrace<float>&,
                                           const Tensor<float>&);
template Parameters<double> backward<double>(const Parameters<double>&, const ModelConfig&,
                                             const ForwardTrace<double>&, const Tensor<double>&);

}  // namespace medner
