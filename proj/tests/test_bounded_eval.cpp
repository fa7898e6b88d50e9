#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hasr/bounded_eval.hpp"
#include "hasr/syntax.hpp"

using namespace hasr;

namespace {

Formula src(const char* text) { return parse(text, Language::Source); }
Formula tgt(const char* text) { return parse(text, Language::Target); }

StructureSpec one_species() {
  StructureSpec spec;
  spec.species[0] = {1, 2};
  return spec;
}

const FiniteStructure& shared_structure() {
  static const FiniteStructure s = FiniteStructure::build(one_species());
  return s;
}

bool eval_tau(const Formula& f, FiniteStructure s, SentinelMode mode, Orientation o) {
  VarMap vm = VarMap::build(f);
  s.adopt(vm);
  s.sentinel_mode = mode;
  return eval(tau(f, vm, {Expansion::Macro, o}), s);
}

// Closed formulas built from number atoms with and, or and exists only.
Formula existential_positive(std::mt19937_64& rng, int depth, std::vector<std::string>& bound) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  auto term = [&]() {
    if (!bound.empty() && pick(3) != 0) return Term::var(bound[pick(bound.size())], Sort::Nat);
    return Term::num(pick(5));
  };
  int choice = depth <= 0 ? pick(2) : pick(5);
  switch (choice) {
    case 0: return Formula::eq(Term::add(term(), term()), term());
    case 1: return Formula::lt(term(), Term::mul(term(), term()));
    case 2: return Formula::conj(existential_positive(rng, depth - 1, bound), existential_positive(rng, depth - 1, bound));
    case 3: return Formula::disj(existential_positive(rng, depth - 1, bound), existential_positive(rng, depth - 1, bound));
    default: {
      std::string name = "x" + std::to_string(bound.size());
      bound.push_back(name);
      Formula body = existential_positive(rng, depth - 1, bound);
      bound.pop_back();
      return Formula::exists(Var{name, Sort::Nat}, body);
    }
  }
}

}  // namespace

TEST(Eval, Examples) {
  const auto& s = shared_structure();
  EXPECT_FALSE(eval(Formula::bottom(), s));
  EXPECT_TRUE(eval(tgt("(existsN (x) (= x 2))"), s));
  EXPECT_FALSE(eval(tgt("(existsN (x) (= x 7))"), s));
  EXPECT_TRUE(eval(src("(exists (x Nat) (= x 2))"), s));
  EXPECT_TRUE(eval(src("(forall (x Nat) (< x 4))"), s));
  EXPECT_TRUE(eval(src("(= (pair 1 2) 8)"), s));
  EXPECT_TRUE(eval(src("(= (succ 3) (+ 2 2))"), s));

  FiniteStructure on = s;
  on.sentinel_mode = SentinelMode::PhiTrue;
  VarMap vm;
  EXPECT_TRUE(eval(tau(Formula::bottom(), vm), on));
  EXPECT_FALSE(eval(tau(Formula::bottom(), vm), s));
}

TEST(Eval, RealAtoms) {
  const auto& s = shared_structure();
  EXPECT_TRUE(eval(tgt("(existsR (r) (= (* 2 r) 1))"), s));
  EXPECT_TRUE(eval(tgt("(existsR (r) (and (< 0 r) (< r 1)))"), s));
  EXPECT_FALSE(eval(tgt("(existsR (r) (= (* 5 r) 1))"), s));
  EXPECT_TRUE(eval(tgt("(forallR (r) (or (= r 0) (apart r 0)))"), s));
  EXPECT_FALSE(eval(tgt("(existsR (r) (= (* 3 r) 2))"), s));
}

TEST(Eval, SpeciesConstants) {
  const auto& s = shared_structure();
  EXPECT_TRUE(eval(src("(in 1 (sconst 0))"), s));
  EXPECT_TRUE(eval(src("(in 2 (sconst 0))"), s));
  EXPECT_FALSE(eval(src("(in 3 (sconst 0))"), s));
  EXPECT_FALSE(eval(src("(in 0 (sconst 0))"), s));
  EXPECT_THROW(eval(src("(in 0 (sconst 4))"), s), EvalError);
  EXPECT_TRUE(eval(src("(exists (X1 Species) (seq (svar 1) (sconst 0)))"), s) ==
              [&] {
                Evaluator e(s);
                for (const auto& v : e.species_family())
                  if (!v.all && v.members == std::set<natural>{1, 2}) return true;
                return false;
              }());
}

TEST(Eval, SpeciesFamily) {
  Evaluator e(shared_structure());
  const auto& fam = e.species_family();
  auto has = [&](SpeciesValue v) { return std::find(fam.begin(), fam.end(), v) != fam.end(); };
  EXPECT_TRUE(has({true, {}}));
  EXPECT_TRUE(has({false, {}}));
  EXPECT_TRUE(has({false, {2}}));
  EXPECT_TRUE(has({false, {6}}));  // 6 * (1/3) = 2 (as written: u = 1/3, v = 2)
  for (const auto& v : fam) EXPECT_LE(v.members.size(), 1u);
}

TEST(Eval, TranslatedMembershipMatchesSource) {
  const auto& s = shared_structure();
  for (auto o : {Orientation::AsWritten, Orientation::QuotientNormalized}) {
    StructureSpec spec = one_species();
    spec.orientation = o;
    FiniteStructure matched = FiniteStructure::build(spec);
    for (int n = 0; n <= 5; ++n) {
      std::string text = "(in " + std::to_string(n) + " (sconst 0))";
      Formula f = src(text.c_str());
      EXPECT_EQ(eval_tau(f, matched, SentinelMode::PhiFalse, o), eval(f, s)) << text;
      EXPECT_TRUE(eval_tau(f, matched, SentinelMode::PhiTrue, o)) << text;
    }
  }
}

TEST(Eval, MismatchedOrientationIsDetected) {
  // The as-written structure realises A0 = {2} with a0 = 1/m, b0 = 1/(2m);
  // reading it with the other orientation claims 2 * a0 = b0, which is false.
  StructureSpec spec;
  spec.species[0] = {2};
  FiniteStructure s = FiniteStructure::build(spec);
  Formula f = src("(in 2 (sconst 0))");
  EXPECT_TRUE(eval_tau(f, s, SentinelMode::PhiFalse, Orientation::AsWritten));
  EXPECT_FALSE(eval_tau(f, s, SentinelMode::PhiFalse, Orientation::QuotientNormalized));
}

TEST(Eval, UnboundVariable) {
  EXPECT_THROW(eval(src("(= x 0)"), shared_structure()), EvalError);
  Assignment env;
  env.nat["x"] = 0;
  EXPECT_TRUE(eval(src("(= x 0)"), shared_structure(), env));
  EXPECT_THROW(eval(tgt("(= r 0)"), shared_structure()), EvalError);
  EXPECT_THROW(eval(src("(in 1 (svar 3))"), shared_structure()), EvalError);
}

TEST(Eval, UndecidedComparisonIsAnError) {
  RealGen wobble = RealGen::custom(
      "wobble", [](std::size_t x) { return Integer(Integer(1) << (x % 2 == 0 ? x : x + 1)); },
      [](std::size_t k) { return k; });
  Assignment env;
  env.real.insert_or_assign("r", wobble);
  EXPECT_THROW(eval(tgt("(= r 1)"), shared_structure(), env), PrecisionError);
  EXPECT_THROW(eval(tgt("(< r 1)"), shared_structure(), env), PrecisionError);
}

TEST(Eval, ClosedFormDisagreementIsAnError) {
  RealGen liar = RealGen::custom(
      "liar", [](std::size_t x) { return Integer(Integer(1) << x); }, [](std::size_t k) { return k + 2; },
      Rational(1, 2));
  Assignment env;
  env.real.insert_or_assign("r", liar);
  EXPECT_THROW(eval(tgt("(= r 1)"), shared_structure(), env), PrecisionError);
}

TEST(Eval, SentinelForcedOnlyWhenFree) {
  FiniteStructure on = shared_structure();
  on.sentinel_mode = SentinelMode::PhiTrue;
  EXPECT_TRUE(eval(tgt("(= y 5)"), on));
  EXPECT_FALSE(eval(tgt("(existsR (y) (= y 5))"), on));
  FiniteStructure off = shared_structure();
  EXPECT_FALSE(eval(tgt("(or (= y 0) (apart y 0))"), off));
}

TEST(Eval, ExistentialPositiveIsMonotone) {
  StructureSpec small, large;
  small.nat_domain = {0, 1, 2};
  large.nat_domain = {0, 1, 2, 3, 4};
  FiniteStructure a = FiniteStructure::build(small), b = FiniteStructure::build(large);
  std::mt19937_64 rng(31);
  int true_on_small = 0;
  for (int i = 0; i < 400; ++i) {
    std::vector<std::string> bound;
    Formula f = existential_positive(rng, 4, bound);
    bool sa = eval(f, a);
    if (sa) {
      ++true_on_small;
      EXPECT_TRUE(eval(f, b)) << print(f);
    }
  }
  EXPECT_GT(true_on_small, 50);
}

TEST(Structure, ParseAndWrite) {
  std::istringstream in(
      "# two species\n"
      "nat 0 1 2\n"
      "real frac 4   # quarter\n"
      "real frac 5\n"
      "real nat 9\n"
      "species 0 1 3\n"
      "species 2\n"
      "orientation normalized\n"
      "precision 20 80\n"
      "sentinel s\n"
      "encode-seed 7\n");
  StructureSpec spec = parse_structure(in);
  EXPECT_EQ(spec.nat_domain, (std::vector<natural>{0, 1, 2}));
  EXPECT_EQ(spec.unit_fractions, (std::vector<natural>{4, 5}));
  EXPECT_EQ(spec.extra_nats, std::vector<natural>{9});
  EXPECT_EQ(spec.species.at(0), (std::set<natural>{1, 3}));
  EXPECT_TRUE(spec.species.at(2).empty());
  EXPECT_EQ(spec.orientation, Orientation::QuotientNormalized);
  EXPECT_EQ(spec.precision.k, 20u);
  EXPECT_EQ(spec.precision.horizon, 80u);
  EXPECT_EQ(spec.sentinel, "s");
  EXPECT_EQ(spec.encode_seed, 7u);

  std::ostringstream out;
  write_structure(out, spec);
  std::istringstream back(out.str());
  EXPECT_EQ(parse_structure(back), spec);
}

TEST(Structure, ParseErrors) {
  for (const char* bad : {"", "real frac 2\n", "nat 0\nfrobnicate\n", "nat 0\nreal frac 0\n", "nat x\n",
                          "nat 0\norientation sideways\n", "nat 0\nprecision 3\n", "nat 0\nreal pi 3\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_structure(in), StructureError) << bad;
  }
}

TEST(Structure, BuildChecksEncodings) {
  const auto& s = shared_structure();
  ASSERT_EQ(s.species_encodings.at(0).size(), 2u);
  EXPECT_NO_THROW(s.verify());

  FiniteStructure swapped = s;
  std::swap(swapped.species_encodings.at(0)[0].encoding, swapped.species_encodings.at(0)[1].encoding);
  EXPECT_THROW(swapped.verify(), StructureError);

  FiniteStructure missing = s;
  missing.species_assign.at(0).insert(3);
  EXPECT_THROW(missing.verify(), StructureError);

  FiniteStructure short_window = s;
  short_window.precision.horizon = 8;
  EXPECT_THROW(short_window.verify(), StructureError);

  StructureSpec zero = one_species();
  zero.species[0] = {0};
  EXPECT_THROW(FiniteStructure::build(zero), StructureError);
}

TEST(Structure, BuildIsDeterministic) {
  FiniteStructure a = FiniteStructure::build(one_species()), b = FiniteStructure::build(one_species());
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_EQ(a.species_encodings.at(0)[i].encoding.source_run, b.species_encodings.at(0)[i].encoding.source_run);
}
