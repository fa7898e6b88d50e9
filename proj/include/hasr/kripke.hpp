#pragma once

// Staged construction of the Kripke-schema sequence beta from a proof-event
// schedule for a formula phi and a 0/1 choice sequence alpha coding a
// species, together with a checker for the five conjuncts of the relativised
// schema on finite runs.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hasr/formula.hpp"

namespace hasr {

/// A 0/1 sequence given as an explicit prefix followed by a repeating tail.
/// Codes the species { k : exists p, alpha(<p,k>) = 1 }.
class ChoiceSeq {
 public:
  /// alpha = 1 everywhere; every k is witnessed at p = 0.
  static ChoiceSeq total();
  /// alpha = 0 everywhere.
  static ChoiceSeq empty();
  /// alpha(<p,k>) = 1 exactly for the listed (p, k).
  static ChoiceSeq witnesses(const std::vector<std::pair<natural, natural>>& pk);
  /// Explicit prefix, then `period` repeated forever (non-empty, 0/1 values).
  static ChoiceSeq periodic(std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> period);

  /// Accepts: total | empty | witnesses:P/K,P/K,... | bits:PREFIX[~PERIOD]
  static ChoiceSeq parse(const std::string& spec);
  /// Canonical spec string; parse(to_spec()) reproduces the sequence.
  std::string to_spec() const;

  std::uint8_t at(natural i) const;
  /// exists p <= bound: alpha(<p,k>) = 1.
  bool witnessed(natural k, natural bound) const;
  /// Exact species membership; decidable because the tail is periodic.
  bool contains(natural k) const;
  /// forall k > 0: contains(k).
  bool is_total() const;
  /// Some member strictly greater than `bound`, if one exists.
  std::optional<natural> member_above(natural bound) const;
  /// Members in [1, bound].
  std::vector<natural> members_upto(natural bound) const;

  friend bool operator==(const ChoiceSeq&, const ChoiceSeq&) = default;

 private:
  ChoiceSeq(std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> period);
  std::vector<std::uint8_t> prefix_;
  std::vector<std::uint8_t> period_;
};

struct Schedule {
  enum class Kind { PhiProvedAt, NotPhiProvedAt, NeverWithinHorizon };
  Kind kind = Kind::NeverWithinHorizon;
  natural moment = 0;

  static Schedule phi_at(natural t) { return {Kind::PhiProvedAt, t}; }
  static Schedule not_phi_at(natural t) { return {Kind::NotPhiProvedAt, t}; }
  static Schedule never() { return {Kind::NeverWithinHorizon, 0}; }

  /// phi@T | notphi@T | never
  static Schedule parse(const std::string& spec);
  std::string to_spec() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct Draw {
  natural moment;
  natural value;
  bool witnessed;

  friend bool operator==(const Draw&, const Draw&) = default;
};

struct RunConfig {
  natural horizon = 0;
  std::uint64_t seed = 0;
  ChoiceSeq alpha = ChoiceSeq::empty();
  Schedule schedule;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct Stabilization {
  natural moment;
  natural value;

  friend bool operator==(const Stabilization&, const Stabilization&) = default;
};

struct SimRun {
  std::vector<natural> beta;  ///< beta(0..horizon)
  std::vector<Draw> draws;
  std::optional<Stabilization> stabilized;
  RunConfig config;

  friend bool operator==(const SimRun&, const SimRun&) = default;
};

/// Uniform draws in [1, n] from a seeded mt19937_64 by rejection sampling.
class DrawSource {
 public:
  explicit DrawSource(std::uint64_t seed);
  natural draw(natural n);

 private:
  std::mt19937_64 engine_;
};

/// Throws std::invalid_argument when horizon < 1 or the schedule's moment
/// exceeds the horizon.
SimRun run(const ChoiceSeq& alpha, const Schedule& sched, natural horizon, std::uint64_t seed);

/// Run with alpha total: the special case where the relativised schema reduces
/// to the randomized one.
SimRun rks_mode(const Schedule& sched, natural horizon, std::uint64_t seed);

enum class ConjunctStatus { Holds, Vacuous, Violated, UndeterminedAtHorizon };
std::string_view to_string(ConjunctStatus s);

struct ConjunctResult {
  ConjunctStatus status = ConjunctStatus::Holds;
  std::string detail;
};

/// C1 fired -> phi; C2 (alpha total and never fired) -> not phi;
/// C3/C4 the per-k alpha/decidedness implications; C5 stabilization.
struct ConjunctReport {
  std::array<ConjunctResult, 5> conjuncts;

  const ConjunctResult& operator[](std::size_t i) const { return conjuncts.at(i); }
  bool any_violated() const;
};

ConjunctReport check_conjuncts(const SimRun& run);

// Trace files: header lines starting with '#', one line per moment
// "n beta(n) drawn_k witnessed", then footer lines with conjunct statuses.
void write_trace(std::ostream& out, const SimRun& run, const ConjunctReport& report);
SimRun read_trace(std::istream& in);

/// key=value summary, one key per line.
void write_summary(std::ostream& out, const SimRun& run, const ConjunctReport& report);

}  // namespace hasr
