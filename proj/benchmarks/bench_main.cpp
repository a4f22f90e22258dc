// Microbenchmarks for the hot paths: graph construction, cascade extraction,
// and the rank-correlation kernel.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <citeflow/cascade.hpp>
#include <citeflow/graph.hpp>
#include <citeflow/stats.hpp>
#include <citeflow/synth.hpp>

namespace {

citeflow::SynthCorpus corpus_50k() {
  citeflow::GenConfig cfg;
  cfg.n_nodes = 50000;
  cfg.refs_per_paper = 3.5;
  cfg.seed = 42;
  return citeflow::generate(cfg);
}

citeflow::CitationGraph graph_50k() {
  const auto corpus = corpus_50k();
  std::vector<std::optional<std::string>> labels;
  labels.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    if (r.venue)
      labels.emplace_back(*r.venue);
    else
      labels.emplace_back();
  }
  citeflow::GraphBuildOptions options;
  options.valid_years = {1980, 2004};
  return build_graph(corpus.records, corpus.edges, options, labels);
}

void BM_generate_50k(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus_50k());
  }
}
BENCHMARK(BM_generate_50k)->Unit(benchmark::kMillisecond);

void BM_build_graph_50k(benchmark::State& state) {
  const auto corpus = corpus_50k();
  citeflow::GraphBuildOptions options;
  options.valid_years = {1980, 2004};
  for (auto _ : state) {
    benchmark::DoNotOptimize(citeflow::build_graph(corpus.records, corpus.edges, options));
  }
}
BENCHMARK(BM_build_graph_50k)->Unit(benchmark::kMillisecond);

void BM_all_cascades_50k(benchmark::State& state) {
  const auto g = graph_50k();
  for (auto _ : state) {
    benchmark::DoNotOptimize(citeflow::all_cascades(g));
  }
}
BENCHMARK(BM_all_cascades_50k)->Unit(benchmark::kMillisecond);

void BM_spearman(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = unif(rng);
  for (auto& v : y) v = unif(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(citeflow::spearman(x, y));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_spearman)->Arg(1000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
