#pragma once

// The translation tau from the two-sorted arithmetic language into the
// language of ordered rings, together with its fixed auxiliary formulas:
// the sentinel phi, phi_N and the defining formula psi of the naturals.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "hasr/formula.hpp"

namespace hasr {

class TranslationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assigns each species variable X_i a pair of real variables (u_i, v_i),
/// each species constant A_i a pair of real constants (a_i, b_i), and fixes
/// the sentinel variable y.
struct VarMap {
  std::map<std::size_t, std::pair<std::string, std::string>> species_vars;
  std::map<std::size_t, std::pair<std::string, std::string>> species_consts;
  std::string sentinel = "y";

  /// Default names u<i>, v<i>, a<i>, b<i> and y for every species index in
  /// f, suffixed where they would clash with a name already used by f.
  static VarMap build(const Formula& f);

  /// Throws TranslationError if some species index of f is unmapped, two
  /// assigned names coincide, an assigned name occurs in f, or f binds the
  /// sentinel.
  void validate(const Formula& f) const;

  Var sentinel_var() const { return Var{sentinel, Sort::Real}; }
};

enum class Expansion { Macro, Full };
/// AsWritten emits (not (= (* n u_i) v_i)); QuotientNormalized emits
/// (not (= (* n v_i) u_i)), the orientation used by the quotient encoding.
enum class Orientation { AsWritten, QuotientNormalized };

struct TranslationConfig {
  Expansion expansion = Expansion::Macro;
  Orientation orientation = Orientation::AsWritten;
};

/// y = 0 or y # 0.
Formula sentinel_phi(const VarMap& vm);
Formula sentinel_phi(const Var& y);

/// phi_N(x, y, u, v) with its inner w and w' chosen fresh. All four
/// arguments must be distinct Real variables.
Formula phi_N(const Var& x, const Var& y, const Var& u, const Var& v);

/// psi(x) = forall y exists u exists v phi_N(x, y, u, v). The bound names
/// are drawn from `names`, which is updated.
Formula psi(const Var& x, NameSupply& names);
/// Same, with a supply that only knows x.
Formula psi(const Var& x);

/// Replaces the defined quantifiers by their expansions:
/// existsN x t -> exists x (psi(x) and t), forallN x t -> forall x (psi(x) -> t),
/// existsR/forallR -> plain real quantifiers.
Formula expand_defined(const Formula& f, NameSupply& names);

/// Throws SortError when f is not a source-language formula and
/// TranslationError when vm does not fit f.
Formula tau(const Formula& f, const VarMap& vm, TranslationConfig cfg = {});

}  // namespace hasr
