#include "hasr/corpus.hpp"

#include <array>
#include <string>

namespace hasr {

namespace {

class Generator {
 public:
  Generator(const CorpusOptions& opts, std::uint64_t seed) : opts_(opts), rng_(seed) {}

  Formula formula(std::size_t depth) { return formula(depth, {}, 0); }

 private:
  const CorpusOptions& opts_;
  std::mt19937_64 rng_;

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  Term term(std::size_t depth, const std::vector<std::string>& nats) {
    if (depth <= 1 || chance(0.5)) {
      if (!nats.empty() && chance(0.6)) return Term::var(nats[below(nats.size())], Sort::Nat);
      return Term::num(below(4));
    }
    switch (below(4)) {
      case 0: return Term::add(term(depth - 1, nats), term(depth - 1, nats));
      case 1: return Term::mul(term(depth - 1, nats), term(depth - 1, nats));
      case 2: return Term::succ(term(depth - 1, nats));
      default: return Term::pair(term(1, nats), term(1, nats));
    }
  }

  SpeciesRef species(std::size_t bound) {
    std::size_t choices = opts_.species_constants.size() + bound;
    std::size_t pick = below(choices);
    if (pick < bound) return SpeciesRef::var(pick + 1);
    return SpeciesRef::constant(opts_.species_constants[pick - bound]);
  }

  Formula atom(const std::vector<std::string>& nats, std::size_t bound) {
    const bool have_species = !opts_.species_constants.empty() || bound > 0;
    std::size_t kind = below(have_species ? 10 : 6);
    if (kind == 0) return Formula::bottom();
    if (kind <= 3) return Formula::eq(term(2, nats), term(2, nats));
    if (kind <= 5) return Formula::lt(term(2, nats), term(2, nats));
    if (kind <= 8) return Formula::in(term(2, nats), species(bound));
    return Formula::species_eq(species(bound), species(bound));
  }

  Formula formula(std::size_t depth, std::vector<std::string> nats, std::size_t bound) {
    if (depth <= 1 || chance(0.25)) return atom(nats, bound);
    static const std::array<const char*, 4> names{"x", "z", "n", "m"};
    std::size_t kind = below(8);
    switch (kind) {
      case 0: return Formula::conj(formula(depth - 1, nats, bound), formula(depth - 1, nats, bound));
      case 1: return Formula::disj(formula(depth - 1, nats, bound), formula(depth - 1, nats, bound));
      case 2: return Formula::implies(formula(depth - 1, nats, bound), formula(depth - 1, nats, bound));
      case 3: return Formula::negate(formula(depth - 1, nats, bound));
      case 4:
      case 5: {
        Var v{names[below(names.size())], Sort::Nat};
        nats.push_back(v.name);
        Formula body = formula(depth - 1, nats, bound);
        return kind == 4 ? Formula::exists(v, body) : Formula::forall(v, body);
      }
      default: {
        if (bound >= opts_.max_species_quantifiers) return formula(depth, nats, bound);
        Var v{species_var_name(bound + 1), Sort::Species};
        Formula body = formula(depth - 1, nats, bound + 1);
        return kind == 6 ? Formula::exists(v, body) : Formula::forall(v, body);
      }
    }
  }
};

}  // namespace

std::vector<Formula> random_corpus(const CorpusOptions& opts) {
  std::vector<Formula> out;
  out.reserve(opts.count);
  Generator g(opts, opts.seed);
  for (std::size_t i = 0; i < opts.count; ++i) out.push_back(g.formula(opts.max_depth));
  return out;
}

std::vector<StructureSpec> random_structures(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<StructureSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    StructureSpec spec;
    for (std::size_t c = 0; c < 2; ++c) {
      std::uint64_t mask = rng() & 7;
      std::set<natural> members;
      for (natural k = 1; k <= 3; ++k)
        if (mask & (1u << (k - 1))) members.insert(k);
      spec.species[c] = members;
    }
    spec.encode_seed = 1 + i;
    out.push_back(spec);
  }
  return out;
}

}  // namespace hasr
