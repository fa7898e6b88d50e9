#pragma once

// Seeded random closed source formulas for the oracle checks.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "hasr/bounded_eval.hpp"
#include "hasr/formula.hpp"

namespace hasr {

struct CorpusOptions {
  std::size_t count = 200;
  /// Atoms have depth 1; each connective or quantifier adds one.
  std::size_t max_depth = 4;
  std::uint64_t seed = 1;
  /// Indices of the species constants formulas may mention.
  std::vector<std::size_t> species_constants{0, 1};
  std::size_t max_species_quantifiers = 2;
};

/// Closed, well-sorted source formulas. Number variables are drawn from
/// {x, z, n, m}; species binders X1, X2 are indexed by nesting level.
std::vector<Formula> random_corpus(const CorpusOptions& opts);

/// Small structures for the corpus: natural domain {0..3} and species
/// constants A0, A1 each a random subset of {1, 2, 3}.
std::vector<StructureSpec> random_structures(std::size_t count, std::uint64_t seed);

}  // namespace hasr
