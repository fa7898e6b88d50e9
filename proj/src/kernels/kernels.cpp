#include "hasr/kernels.hpp"

#include <exception>

namespace hasr {

std::vector<SimRun> simulate_ensemble_serial(const ChoiceSeq& alpha, const Schedule& sched, natural horizon,
                                             const std::vector<std::uint64_t>& seeds) {
  std::vector<SimRun> out;
  out.reserve(seeds.size());
  for (auto seed : seeds) out.push_back(run(alpha, sched, horizon, seed));
  return out;
}

std::vector<SimRun> simulate_ensemble(const ChoiceSeq& alpha, const Schedule& sched, natural horizon,
                                      const std::vector<std::uint64_t>& seeds) {
  // Validate once up front so no exception has to cross the parallel region.
  if (!seeds.empty()) (void)run(alpha, sched, horizon, seeds.front());
  std::vector<SimRun> out(seeds.size());
  const long n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) out[i] = run(alpha, sched, horizon, seeds[i]);
  return out;
}

namespace {

CorpusVerdict evaluate_one(const Formula& f, const FiniteStructure& s) {
  CorpusVerdict v;
  try {
    TranslationConfig cfg{Expansion::Macro, s.orientation};
    VarMap vm = VarMap::build(f);
    Formula t = tau(f, vm, cfg);

    FiniteStructure off = s;
    off.adopt(vm);
    off.sentinel_mode = SentinelMode::PhiFalse;
    FiniteStructure on = off;
    on.sentinel_mode = SentinelMode::PhiTrue;

    v.source = Evaluator(s).eval(f);
    v.target_phi_false = Evaluator(off).eval(t);
    v.target_phi_true = Evaluator(on).eval(t);
  } catch (const std::exception& e) {
    v.error = e.what();
  }
  return v;
}

}  // namespace

std::vector<CorpusVerdict> evaluate_corpus_serial(const std::vector<Formula>& corpus, const FiniteStructure& s) {
  std::vector<CorpusVerdict> out;
  out.reserve(corpus.size());
  for (const auto& f : corpus) out.push_back(evaluate_one(f, s));
  return out;
}

std::vector<CorpusVerdict> evaluate_corpus(const std::vector<Formula>& corpus, const FiniteStructure& s) {
  std::vector<CorpusVerdict> out(corpus.size());
  const long n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[i] = evaluate_one(corpus[i], s);
  return out;
}

}  // namespace hasr
