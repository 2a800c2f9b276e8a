#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "ctxsearch/harness.hpp"
#include "ctxsearch/recommender.hpp"
#include "ctxsearch/search_core.hpp"
#include "ctxsearch/stats.hpp"

using namespace ctxsearch;

namespace {

std::vector<std::pair<EntryId, TermVector>> random_store(std::size_t n, std::size_t vocab, std::mt19937_64& rng) {
  std::vector<std::pair<EntryId, TermVector>> entries;
  for (std::size_t i = 0; i < n; ++i) {
    TermVector v;
    for (std::size_t t = 0; t < 1 + rng() % 8; ++t) v.add("v" + std::to_string(rng() % vocab), 1.0 + rng() % 3);
    entries.emplace_back(i + 1, std::move(v));
  }
  return entries;
}

TermVector random_query(std::size_t vocab, std::mt19937_64& rng) {
  TermVector q;
  for (int t = 0; t < 3; ++t) q.add("v" + std::to_string(rng() % vocab));
  return q;
}

void BM_NeighborIndexTopK(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const NeighborIndex index(random_store(static_cast<std::size_t>(state.range(0)), 2000, rng));
  const auto q = random_query(2000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(index.top_k(q, 10));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NeighborIndexTopK)->Range(500, 50000);

void BM_BruteForceTopK(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto entries = random_store(static_cast<std::size_t>(state.range(0)), 2000, rng);
  const auto q = random_query(2000, rng);
  for (auto _ : state) {
    std::vector<Neighbor> all;
    for (const auto& [id, v] : entries) {
      const double s = cosine(q, v);
      if (s > 0.0) all.push_back({id, s});
    }
    const auto n = std::min<std::size_t>(10, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                      [](const Neighbor& a, const Neighbor& b) { return a.score > b.score; });
    benchmark::DoNotOptimize(all);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BruteForceTopK)->Range(500, 50000);

void BM_EvaluateBoolean(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<Document> docs;
  for (DocId id = 1; id <= static_cast<DocId>(state.range(0)); ++id) {
    Document d;
    d.doc_id = id;
    d.url = "doc://" + std::to_string(id);
    for (int t = 0; t < 40; ++t) d.body_terms.push_back("w" + std::to_string(rng() % 300));
    docs.push_back(std::move(d));
  }
  const auto index = index_corpus(docs, StopwordList({"the"}));
  const auto q = parse_query("w1 AND (w2 OR w3 OR w4) AND (w5 OR w6)");
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_boolean(q, index));
}
BENCHMARK(BM_EvaluateBoolean)->Range(100, 20000);

void BM_SearchRankedFixture(benchmark::State& state) {
  const std::filesystem::path data = CTXSEARCH_DATA_DIR;
  const auto stop = load_stopwords(data / "stopwords.txt");
  const auto index = index_corpus(load_corpus_dir(data / "corpus", stop), stop);
  const auto q = parse_query("jaguar AND (larg OR spot OR wild OR cat) AND (prei)");
  const auto ctx = TermVector::unit({"jaguar", "larg", "spot", "wild", "cat", "prei"});
  for (auto _ : state) benchmark::DoNotOptimize(search_ranked(q, ctx, index, 10));
}
BENCHMARK(BM_SearchRankedFixture);

void BM_KruskalWallis(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<double>> groups(3);
  for (auto& g : groups) {
    for (int i = 0; i < state.range(0); ++i) g.push_back(static_cast<double>(rng() % 50));
  }
  for (auto _ : state) benchmark::DoNotOptimize(kruskal_wallis(groups));
}
BENCHMARK(BM_KruskalWallis)->Range(10, 10000);

void BM_SimulatePhaseOS2(benchmark::State& state) {
  const std::filesystem::path data = CTXSEARCH_DATA_DIR;
  const auto cfg = load_simulation_config(data / "simulation.json");
  const auto work = std::filesystem::temp_directory_path() / "ctxsearch-bench-os2";
  for (auto _ : state) benchmark::DoNotOptimize(simulate_phase(cfg, Phase::kOS2, 42, work));
  std::filesystem::remove_all(work);
}
BENCHMARK(BM_SimulatePhaseOS2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
