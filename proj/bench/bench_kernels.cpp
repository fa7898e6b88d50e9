#include <benchmark/benchmark.h>

#include <numeric>

#include "hasr/corpus.hpp"
#include "hasr/kernels.hpp"

using namespace hasr;

namespace {

std::vector<std::uint64_t> seed_range(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

const ChoiceSeq& sparse_alpha() {
  static const ChoiceSeq a = ChoiceSeq::parse("witnesses:3/7,5/11");
  return a;
}

void BM_EnsembleSerial(benchmark::State& state) {
  auto seeds = seed_range(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_ensemble_serial(sparse_alpha(), Schedule::phi_at(2), 2000, seeds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnsembleParallel(benchmark::State& state) {
  auto seeds = seed_range(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(sparse_alpha(), Schedule::phi_at(2), 2000, seeds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct CorpusFixture {
  std::vector<Formula> corpus;
  FiniteStructure structure;
};

const CorpusFixture& corpus_fixture() {
  static const CorpusFixture f = [] {
    CorpusOptions opts;
    opts.count = 400;
    return CorpusFixture{random_corpus(opts), FiniteStructure::build(random_structures(1, 1).front())};
  }();
  return f;
}

void BM_CorpusSerial(benchmark::State& state) {
  const auto& f = corpus_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_corpus_serial(f.corpus, f.structure));
  state.SetItemsProcessed(state.iterations() * f.corpus.size());
}

void BM_CorpusParallel(benchmark::State& state) {
  const auto& f = corpus_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_corpus(f.corpus, f.structure));
  state.SetItemsProcessed(state.iterations() * f.corpus.size());
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnsembleParallel)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorpusSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorpusParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
