#include <benchmark/benchmark.h>

#include "medner/corpus/synthetic.hpp"
#include "medner/eval/metrics.hpp"

using namespace medner;

namespace {

LabelSequences label_sequences(std::size_t records, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_records = records;
  spec.max_len = 24;
  spec.seed = seed;
  LabelSequences out;
  for (auto& r : gen_synthetic(spec).records) out.push_back(std::move(r.labels));
  return out;
}

void BM_SpanMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto gold = label_sequences(n, 1);
  auto pred = gold;
  const auto other = label_sequences(n, 2);
  for (std::size_t i = 0; i < n; i += 3) {
    if (other[i].size() == pred[i].size()) pred[i] = other[i];
  }
  for (auto _ : state) {
    auto m = span_metrics(pred, gold);
    benchmark::DoNotOptimize(m.micro.tp);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SpanMetrics)->Arg(300)->Arg(3000);

BENCHMARK_MAIN();
