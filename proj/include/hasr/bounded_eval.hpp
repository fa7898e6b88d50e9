#pragma once

// Classical two-valued evaluation of source and target formulas over small
// finite structures. This is the brute-force oracle the translation is
// checked against; it says nothing about intuitionistic validity.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hasr/formula.hpp"
#include "hasr/realgen.hpp"
#include "hasr/species.hpp"
#include "hasr/translator.hpp"

namespace hasr {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real comparison the bounded searches could not settle, or settled
/// against the exact value. Never resolved silently.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SentinelMode { PhiTrue, PhiFalse };

/// The textual description of a structure. Format, one directive per line,
/// `#` to end of line is a comment:
///
///   nat 0 1 2 3          natural domain (also seeds f_n into the reals)
///   real frac 2 3        unit fractions 1/2, 1/3 added to the real domain
///                        (2 and 3 when no frac line is given)
///   real nat 5           extra f_5 in the real domain
///   species 0 1 2        species constant A0 = {1, 2}; members are >= 1
///   orientation as-written | normalized
///   precision 24 96      agreement 2^-24, search horizon 96
///   sentinel y           name of the sentinel variable
///   encode-seed 1        first seed tried when realising species
struct StructureSpec {
  std::vector<natural> nat_domain{0, 1, 2, 3};
  std::vector<natural> unit_fractions{2, 3};
  std::vector<natural> extra_nats;
  std::map<std::size_t, std::set<natural>> species;
  Orientation orientation = Orientation::AsWritten;
  Precision precision{24, 96};
  std::string sentinel = "y";
  std::uint64_t encode_seed = 1;

  friend bool operator==(const StructureSpec&, const StructureSpec&) = default;
};

StructureSpec parse_structure(std::istream& in);
void write_structure(std::ostream& out, const StructureSpec& spec);

/// One realisation of a species constant: an encoding whose only quotient
/// is `member`.
struct Realisation {
  natural member;
  EncodedSpecies encoding;
};

struct FiniteStructure {
  std::vector<natural> nat_domain;
  std::vector<RealGen> real_domain;
  std::map<std::size_t, std::set<natural>> species_assign;
  /// One realisation per member; an atom mentioning a_i or b_i is true when
  /// it is true under some realisation of A_i.
  std::map<std::size_t, std::vector<Realisation>> species_encodings;
  SentinelMode sentinel_mode = SentinelMode::PhiFalse;
  Precision precision;
  Orientation orientation = Orientation::AsWritten;
  std::string sentinel = "y";
  /// Real-constant name -> (species index, true for the a-role).
  std::map<std::string, std::pair<std::size_t, bool>> constant_names;

  /// Realises every species constant by simulated runs and checks the
  /// encodings against the assignment. Throws StructureError.
  static FiniteStructure build(const StructureSpec& spec, SentinelMode mode = SentinelMode::PhiFalse);

  /// Takes the sentinel and constant names a translation used.
  void adopt(const VarMap& vm);

  /// Re-checks the invariants; throws StructureError.
  void verify() const;
};

/// A species value on the source side: either every natural or a finite set.
struct SpeciesValue {
  bool all = false;
  std::set<natural> members;

  bool contains(natural n) const { return all || members.count(n) != 0; }
  friend bool operator==(const SpeciesValue&, const SpeciesValue&) = default;
  friend auto operator<=>(const SpeciesValue&, const SpeciesValue&) = default;
};

struct Assignment {
  std::map<std::string, natural> nat;
  std::map<std::string, RealGen> real;
  std::map<std::size_t, SpeciesValue> species;
};

/// Long-lived evaluator with term and comparison caches. Not thread-safe;
/// use one per thread over a shared structure.
class Evaluator {
 public:
  explicit Evaluator(const FiniteStructure& s);
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;

  /// Throws EvalError for unbound variables or ill-defined terms and
  /// PrecisionError for undecided real comparisons.
  bool eval(const Formula& f, const Assignment& env = {});

  /// The family species quantifiers range over: S(u, v) for u, v in the
  /// real domain, read off in the structure's orientation.
  const std::vector<SpeciesValue>& species_family();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool eval(const Formula& f, const FiniteStructure& s, const Assignment& env = {});

}  // namespace hasr
