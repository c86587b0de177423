#include <benchmark/benchmark.h>

#include "crossover/corpus.hpp"
#include "crossover/index.hpp"
#include "crossover/probe.hpp"
#include "crossover/stats.hpp"

using namespace crossover;

namespace {

CorpusSpec zipf_spec(std::uint64_t tokens) {
  CorpusSpec s;
  s.vocab_size = 10000;
  s.total_tokens = tokens;
  s.doc_count = tokens / 10;
  s.word_length_range = {1, 8};
  s.typo_prob = 0.05;
  s.inject_prob = 0.01;
  s.seed = 1;
  return s;
}

void BM_GenerateZipf(benchmark::State& state) {
  const auto spec = zipf_spec(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate_corpus(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateZipf)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_BuildIndex(benchmark::State& state) {
  const auto corpus = generate_corpus(zipf_spec(static_cast<std::uint64_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(Index(corpus));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildIndex)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Lookup(benchmark::State& state) {
  const Index index(generate_corpus(zipf_spec(1000000)));
  Campaign c;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.lookup(campaign_query(c, 4, i++)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Lookup);

void BM_Campaign(benchmark::State& state) {
  const Index index(generate_corpus(zipf_spec(1000000)));
  LocalBackend backend(index);
  Campaign c;
  c.queries_per_n = 2000;
  c.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(summarize(run_campaign(c, backend)));
  state.SetItemsProcessed(state.iterations() * 10 * 2000);
}
BENCHMARK(BM_Campaign)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_NullReservoir(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_null_reservoir(26, 1, 6, 17576, 100, 1));
  state.SetItemsProcessed(state.iterations() * 6 * 17576);
}
BENCHMARK(BM_NullReservoir)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
