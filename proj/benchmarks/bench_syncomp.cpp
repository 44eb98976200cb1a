#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "syncomp/complexity.hpp"
#include "syncomp/dialogue.hpp"
#include "syncomp/mstdecode.hpp"
#include "syncomp/stats.hpp"
#include "syncomp/synth.hpp"

using namespace syncomp;

namespace {

std::vector<int> random_tree(std::mt19937_64& rng, int n) {
  std::vector<int> heads(n, 0);
  for (int i = 1; i < n; ++i) heads[i] = 1 + static_cast<int>(rng() % i);
  return heads;
}

std::vector<ComplexityRecord> synthetic_records(int dialogues, int per_role) {
  SynthConfig c;
  c.dialogues = dialogues;
  c.initiator.utterances = per_role;
  c.follower.utterances = per_role;
  const auto text = serialize_conllu(synthesize_corpus(c));
  const auto corpus = load_corpus({{"synth", text}}, nullptr).corpus;
  std::vector<ComplexityRecord> out;
  for (auto& r : complexity_series(corpus, ComplexityConfig{})) {
    if (r.role == Role::kInitiator) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

static void BM_ComputeMetrics(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto tree = tree_from_heads(random_tree(rng, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(tree));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ComputeMetrics)->Arg(8)->Arg(32)->Arg(128);

static void BM_ParseConllu(benchmark::State& state) {
  SynthConfig c;
  c.dialogues = 10;
  const auto text = serialize_conllu(synthesize_corpus(c));
  for (auto _ : state) benchmark::DoNotOptimize(parse_conllu(text));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseConllu);

static void BM_MstDecode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  ScoreMatrix m(n);
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) m.set(h, d, z(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mst_decode(m));
}
BENCHMARK(BM_MstDecode)->Arg(4)->Arg(16)->Arg(40);

static void BM_FitLmm(benchmark::State& state) {
  const auto records = synthetic_records(static_cast<int>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(fit_lmm(records));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(records.size()));
}
BENCHMARK(BM_FitLmm)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_BootstrapBands(benchmark::State& state) {
  const auto records = synthetic_records(200, 30);
  BootstrapOptions opts;
  opts.n_resamples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_bands(records, opts));
}
BENCHMARK(BM_BootstrapBands)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
