#pragma once

// Two-sorted formula ASTs shared by the arithmetic source language and the
// ordered-ring target language.
//
// Nodes are immutable and reference counted; copying a Term or Formula only
// copies a pointer. Sorts are checked when a node is built, so every value
// that exists is well-sorted.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace hasr {

using natural = std::uint64_t;

enum class Sort { Nat, Species, Real };

std::string_view to_string(Sort s);
std::optional<Sort> sort_from_string(std::string_view s);

/// Raised when a node would be ill-sorted. `subterm` is the printed
/// offending piece.
class SortError : public std::runtime_error {
 public:
  SortError(const std::string& what, std::string subterm)
      : std::runtime_error(what + ": " + subterm), subterm_(std::move(subterm)) {}
  const std::string& subterm() const noexcept { return subterm_; }

 private:
  std::string subterm_;
};

struct Var {
  std::string name;
  Sort sort = Sort::Nat;

  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var&, const Var&) = default;
};

/// Species binders are named X<i>; the index is what SpeciesRef refers to.
std::string species_var_name(std::size_t index);
std::optional<std::size_t> species_index_of(std::string_view name);

struct SpeciesRef {
  enum class Kind { Variable, Constant };
  Kind kind = Kind::Variable;
  std::size_t index = 0;

  static SpeciesRef var(std::size_t i) { return {Kind::Variable, i}; }
  static SpeciesRef constant(std::size_t i) { return {Kind::Constant, i}; }
  bool is_var() const { return kind == Kind::Variable; }

  friend bool operator==(const SpeciesRef&, const SpeciesRef&) = default;
};

// ---------------------------------------------------------------------------
// Terms

enum class TermOp { Add, Mul, Pair };

class Term {
 public:
  struct VarNode { Var var; };
  /// Numerals are sort-polymorphic: they take the number sort of the
  /// surrounding context (Nat in the source language, Real in the target).
  struct Numeral { natural value; };
  struct RealConst { std::string name; };
  struct Binary;
  struct Succ;
  using Node = std::variant<VarNode, Numeral, RealConst, Binary, Succ>;

  static Term var(std::string name, Sort sort);
  static Term var(const Var& v) { return var(v.name, v.sort); }
  static Term num(natural n);
  static Term zero() { return num(0); }
  static Term one() { return num(1); }
  static Term real_const(std::string name);
  static Term add(Term a, Term b);
  static Term mul(Term a, Term b);
  static Term pair(Term a, Term b);
  static Term succ(Term a);

  const Node& node() const;
  /// nullopt for terms built only from numerals.
  std::optional<Sort> sort() const { return sort_; }

  template <class T> const T* as() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  Term(std::shared_ptr<const Node> n, std::optional<Sort> s) : node_(std::move(n)), sort_(s) {}
  std::shared_ptr<const Node> node_;
  std::optional<Sort> sort_;
};

struct Term::Binary { TermOp op; Term lhs; Term rhs; };
struct Term::Succ { Term arg; };

inline const Term::Node& Term::node() const { return *node_; }
template <class T> const T* Term::as() const { return std::get_if<T>(node_.get()); }

// ---------------------------------------------------------------------------
// Formulas

enum class AtomKind { Eq, Lt, Apart };
enum class Connective { And, Or, Implies };
enum class Quantifier { Exists, Forall };
/// Relativised quantifiers of the target language: over the naturals
/// (inside the reals) and over real-number generators.
enum class DefinedKind { ExistsNat, ForallNat, ExistsReal, ForallReal };

std::string_view keyword(DefinedKind k);

class Formula {
 public:
  struct Bottom {};
  struct Atom { AtomKind kind; Term lhs; Term rhs; };
  struct In { Term element; SpeciesRef species; };
  struct SpeciesEq { SpeciesRef lhs; SpeciesRef rhs; };
  struct Binary;
  struct Quant;
  struct Defined;
  using Node = std::variant<Bottom, Atom, In, SpeciesEq, Binary, Quant, Defined>;

  static Formula bottom();
  static Formula eq(Term a, Term b);
  static Formula lt(Term a, Term b);
  static Formula apart(Term a, Term b);
  static Formula in(Term t, SpeciesRef s);
  static Formula species_eq(SpeciesRef a, SpeciesRef b);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  /// Negation is (f -> bot).
  static Formula negate(Formula f) { return implies(std::move(f), bottom()); }
  static Formula iff(const Formula& a, const Formula& b);
  static Formula exists(Var v, Formula body);
  static Formula forall(Var v, Formula body);
  static Formula quant(Quantifier q, Var v, Formula body);
  static Formula defined(DefinedKind k, Var v, Formula body);

  const Node& node() const;
  template <class T> const T* as() const;
  bool is_bottom() const { return as<Bottom>() != nullptr; }
  /// Matches (f -> bot); returns f.
  std::optional<Formula> negated() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Formula::Binary { Connective op; Formula lhs; Formula rhs; };
struct Formula::Quant { Quantifier q; Var var; Formula body; };
struct Formula::Defined { DefinedKind kind; Var var; Formula body; };

inline const Formula::Node& Formula::node() const { return *node_; }
template <class T> const T* Formula::as() const { return std::get_if<T>(node_.get()); }

// ---------------------------------------------------------------------------
// Free variables and substitution

struct FreeVars {
  std::set<std::string> nat;
  std::set<std::size_t> species;
  std::set<std::string> real;

  friend bool operator==(const FreeVars&, const FreeVars&) = default;
};

FreeVars free_vars(const Formula& f);
FreeVars free_vars(const Term& t);
/// Names of RealConst symbols occurring anywhere in f.
std::set<std::string> real_constants(const Formula& f);
/// Every variable name occurring in f, bound or free, any sort.
std::set<std::string> all_names(const Formula& f);
/// Largest species index occurring in f (variables and constants), if any.
std::optional<std::size_t> max_species_index(const Formula& f);

/// Deterministic fresh names: base, then base_1, base_2, ... skipping anything
/// already reserved.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(std::set<std::string> used) : used_(std::move(used)) {}

  /// Returns `base` itself if it is still free.
  std::string fresh(const std::string& base);
  /// Always suffixed, even if `base` is free.
  std::string fresh_suffixed(const std::string& base);
  void reserve(const std::string& name) { used_.insert(name); }
  void reserve(const std::set<std::string>& names) { used_.insert(names.begin(), names.end()); }
  bool used(const std::string& name) const { return used_.count(name) != 0; }

 private:
  std::set<std::string> used_;
};

/// Capture-avoiding substitution of a Nat or Real variable. Throws SortError
/// when t's sort does not match v's.
Formula substitute(const Formula& f, const Var& v, const Term& t);
Term substitute(const Term& in, const Var& v, const Term& t);

/// Capture-avoiding replacement of the species variable X_index by `with`.
Formula substitute_species(const Formula& f, std::size_t index, SpeciesRef with);

// ---------------------------------------------------------------------------
// Pairing

/// Cantor pairing (p+k)(p+k+1)/2 + k. Throws std::overflow_error if the
/// result does not fit in 64 bits.
natural pair(natural p, natural k);
std::pair<natural, natural> unpair(natural z);

}  // namespace hasr
