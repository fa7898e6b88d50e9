#include "hasr/selftest.hpp"

#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hasr/corpus.hpp"
#include "hasr/kernels.hpp"
#include "hasr/kripke.hpp"
#include "hasr/realgen.hpp"
#include "hasr/species.hpp"
#include "hasr/syntax.hpp"
#include "hasr/translator.hpp"

namespace hasr {

namespace {

using Check = std::function<std::string()>;  // empty string on success

std::string translator_goldens() {
  Formula bot = Formula::bottom();
  if (print(tau(bot, VarMap::build(bot))) != "(or (= y 0) (apart y 0))") return "tau(bot) differs";
  Formula in = parse("(in n (svar 1))", Language::Source);
  VarMap vm = VarMap::build(in);
  if (print(tau(in, vm)) != "(imp (not (= (* n u1) v1)) (or (= y 0) (apart y 0)))") return "as-written clause differs";
  TranslationConfig norm{Expansion::Macro, Orientation::QuotientNormalized};
  if (print(tau(in, vm, norm)) != "(imp (not (= (* n v1) u1)) (or (= y 0) (apart y 0)))")
    return "normalized clause differs";
  return {};
}

std::string psi_shape() {
  Formula p = psi(Var{"x", Sort::Real});
  FreeVars fv = free_vars(p);
  if (fv.real != std::set<std::string>{"x"} || !fv.nat.empty()) return "psi(x) free variables wrong";
  const auto* q1 = p.as<Formula::Quant>();
  const auto* q2 = q1 ? q1->body.as<Formula::Quant>() : nullptr;
  const auto* q3 = q2 ? q2->body.as<Formula::Quant>() : nullptr;
  if (!q1 || !q2 || !q3 || q1->q != Quantifier::Forall || q2->q != Quantifier::Exists || q3->q != Quantifier::Exists)
    return "psi prefix is not forall exists exists";
  return {};
}

std::string round_trip() {
  CorpusOptions opts;
  opts.seed = 11;
  for (const auto& f : random_corpus(opts)) {
    if (!(parse(print(f), Language::Source) == f)) return "round trip failed on " + print(f);
    VarMap vm = VarMap::build(f);
    Formula t = tau(f, vm, {Expansion::Full, Orientation::AsWritten});
    if (!(parse(print(t), Language::Target) == t)) return "target round trip failed";
  }
  return {};
}

std::string pairing() {
  for (natural z = 0; z <= 10000; ++z) {
    auto [p, k] = unpair(z);
    if (pair(p, k) != z) return "pair(unpair(" + std::to_string(z) + ")) differs";
  }
  return {};
}

std::string generator_identities() {
  Precision prec{16, 64};
  for (unsigned long n = 0; n <= 20; ++n) {
    for (unsigned long m = 0; m <= 20; ++m) {
      RealGen s = add(from_nat(n), from_nat(m)), p = mul(from_nat(n), from_nat(m));
      RealGen es = from_nat(n + m), ep = from_nat(n * m);
      for (std::size_t x = 0; x <= 40; x += 8)
        if (s.at(x) != es.at(x) || p.at(x) != ep.at(x)) return "pointwise identity fails at n=" + std::to_string(n);
    }
    RealGen third = from_unit_fraction(3);
    if (!eq_at(mul(from_nat(n), third), nat_scalar(n, third), prec)) return "n*g differs from the n-fold sum";
  }
  for (unsigned long q = 1; q <= 10; ++q)
    if (!check_R(from_unit_fraction(q), Precision{20, 64})) return "1/" + std::to_string(q) + " fails check_R";
  return {};
}

std::string simulator_invariants() {
  const ChoiceSeq alpha = ChoiceSeq::parse("witnesses:0/1,2/3");
  const Schedule scheds[] = {Schedule::phi_at(2), Schedule::not_phi_at(3), Schedule::never()};
  for (const auto& sched : scheds) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      SimRun r = run(alpha, sched, 120, seed);
      ConjunctReport rep = check_conjuncts(r);
      if (rep[0].status != ConjunctStatus::Holds || rep[4].status != ConjunctStatus::Holds)
        return "C1 or C5 fails for seed " + std::to_string(seed);
      if (rep.any_violated()) return "a conjunct is violated for seed " + std::to_string(seed);
      if (r.stabilized && !alpha.contains(r.stabilized->value)) return "stabilized outside the species";
    }
  }
  for (natural t = 1; t <= 10; ++t) {
    SimRun r = rks_mode(Schedule::phi_at(t), t + 5, t);
    if (!r.stabilized || r.stabilized->moment != t) return "rks run does not stabilize at t=" + std::to_string(t);
  }
  return {};
}

std::string encoder_quotients() {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimRun r = run(ChoiceSeq::parse("witnesses:0/2,0/3"), Schedule::phi_at(1), 60, seed);
    if (!r.stabilized) continue;
    EncodedSpecies enc = encode(r);
    natural k = r.stabilized->value;
    if (quotient_status(enc, k, encoding_precision(enc, 16)) != Quotient::Confirmed) return "realized k not confirmed";
    for (natural n = 1; n <= 20; ++n)
      if (n != k && quotient_status(enc, n, encoding_precision(enc, 24)) != Quotient::Excluded)
        return "quotient " + std::to_string(n) + " not excluded";
  }
  return {};
}

std::string collapse_and_absorption() {
  CorpusOptions opts;
  opts.seed = 3;
  auto corpus = random_corpus(opts);
  for (auto orientation : {Orientation::AsWritten, Orientation::QuotientNormalized}) {
    for (auto spec : random_structures(2, 7)) {
      spec.orientation = orientation;
      FiniteStructure s = FiniteStructure::build(spec);
      auto verdicts = evaluate_corpus(corpus, s);
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (!verdicts[i].error.empty()) return "evaluation error: " + verdicts[i].error;
        if (!verdicts[i].collapses()) return "collapse fails on " + print(corpus[i]);
        if (!verdicts[i].absorbs()) return "absorption fails on " + print(corpus[i]);
      }
    }
  }
  return {};
}

std::string determinism() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 64; ++s) seeds.push_back(s);
  const ChoiceSeq alpha = ChoiceSeq::parse("witnesses:1/2");
  if (simulate_ensemble(alpha, Schedule::phi_at(2), 100, seeds) !=
      simulate_ensemble_serial(alpha, Schedule::phi_at(2), 100, seeds))
    return "parallel ensemble differs from serial";
  SimRun r = run(alpha, Schedule::phi_at(2), 100, 5);
  std::ostringstream a, b;
  write_trace(a, r, check_conjuncts(r));
  std::istringstream in(a.str());
  SimRun back = read_trace(in);
  write_trace(b, back, check_conjuncts(back));
  if (a.str() != b.str() || !(back == r)) return "trace does not round trip";
  return {};
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  const std::pair<const char*, Check> checks[] = {
      {"translator-goldens", translator_goldens},
      {"psi-shape", psi_shape},
      {"print-parse-round-trip", round_trip},
      {"pairing-bijection", pairing},
      {"generator-identities", generator_identities},
      {"simulator-invariants", simulator_invariants},
      {"encoder-quotients", encoder_quotients},
      {"collapse-and-absorption", collapse_and_absorption},
      {"determinism", determinism},
  };
  std::vector<SelftestCheck> out;
  for (const auto& [name, fn] : checks) {
    SelftestCheck c{name, false, {}};
    try {
      c.detail = fn();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

void print_selftest(std::ostream& out, const std::vector<SelftestCheck>& checks) {
  std::size_t passed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(26) << c.name;
    if (!c.detail.empty()) out << c.detail;
    out << '\n';
    if (c.passed) ++passed;
  }
  out << passed << '/' << checks.size() << " checks passed\n";
}

}  // namespace hasr
