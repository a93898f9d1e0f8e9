#include <benchmark/benchmark.h>

#include "medner/model/encoder.hpp"
#include "medner/model/init.hpp"
#include "medner/rng.hpp"
#include "medner/training/adam.hpp"
#include "medner/training/backward.hpp"
#include "medner/training/loss.hpp"

using namespace medner;

namespace {

// Desk-scale shapes: d_model 64, 4 heads, 2 layers, batch 16, length 24.
ModelConfig desk_model() {
  ModelConfig c;
  c.vocab_size = 520;
  c.n_labels = 7;
  c.d_model = 64;
  c.n_heads = 4;
  c.n_layers = 2;
  c.d_ff = 128;
  c.max_len = 24;
  c.dropout_rate = 0.1;
  return c;
}

struct Fixture {
  ModelConfig config = desk_model();
  TokenBatch batch;
  std::vector<std::int32_t> labels;

  explicit Fixture(std::size_t batch_size) {
    Rng rng(1);
    std::vector<std::vector<std::int32_t>> seqs(batch_size);
    for (auto& s : seqs) {
      s.resize(12 + rng.below(13));
      for (auto& t : s) t = static_cast<std::int32_t>(2 + rng.below(config.vocab_size - 2));
    }
    batch = TokenBatch::from_sequences(seqs);
    labels.resize(batch.mask.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      labels[i] = batch.mask[i] ? static_cast<std::int32_t>(rng.below(config.n_labels)) : kIgnoreLabel;
    }
  }
};

template <class T>
void BM_Forward(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  const auto params = init_params<T>(f.config, 7);
  for (auto _ : state) {
    auto out = forward(params, f.config, f.batch);
    benchmark::DoNotOptimize(out.logits.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <class T>
void BM_TrainStep(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  auto params = init_params<T>(f.config, 7);
  auto adam = AdamState<T>::zeros_like(params);
  std::uint64_t step = 0;
  for (auto _ : state) {
    const auto fwd = forward(params, f.config, f.batch, DropoutOptions{true, step++});
    const auto loss = cross_entropy(fwd.logits, f.labels);
    const auto grads = backward(params, f.config, fwd.trace, loss.dlogits);
    adam_step(params, grads, adam, 1e-3, AdamOptions{});
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Forward<float>)->Arg(1)->Arg(16);
BENCHMARK(BM_Forward<double>)->Arg(16);
BENCHMARK(BM_TrainStep<float>)->Arg(16);
BENCHMARK(BM_TrainStep<double>)->Arg(16);

BENCHMARK_MAIN();
