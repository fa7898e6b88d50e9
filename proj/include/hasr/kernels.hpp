#pragma once

// Batch drivers. Each comes as a serial reference and an OpenMP version that
// must produce identical results in the same order.

#include <cstdint>
#include <string>
#include <vector>

#include "hasr/bounded_eval.hpp"
#include "hasr/kripke.hpp"
#include "hasr/translator.hpp"

namespace hasr {

std::vector<SimRun> simulate_ensemble_serial(const ChoiceSeq& alpha, const Schedule& sched, natural horizon,
                                             const std::vector<std::uint64_t>& seeds);
std::vector<SimRun> simulate_ensemble(const ChoiceSeq& alpha, const Schedule& sched, natural horizon,
                                      const std::vector<std::uint64_t>& seeds);

/// Source value and the two sentinel readings of the translation for one
/// corpus formula.
struct CorpusVerdict {
  bool source = false;
  bool target_phi_false = false;
  bool target_phi_true = false;
  std::string error;  ///< non-empty when evaluation failed

  bool collapses() const { return error.empty() && source == target_phi_false; }
  bool absorbs() const { return error.empty() && target_phi_true; }
  friend bool operator==(const CorpusVerdict&, const CorpusVerdict&) = default;
};

/// The translation uses the structure's orientation; `expansion` must be
/// Macro since psi is not evaluated.
std::vector<CorpusVerdict> evaluate_corpus_serial(const std::vector<Formula>& corpus, const FiniteStructure& s);
std::vector<CorpusVerdict> evaluate_corpus(const std::vector<Formula>& corpus, const FiniteStructure& s);

}  // namespace hasr
