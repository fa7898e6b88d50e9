#pragma once

// Random well-sorted ASTs for property tests, covering every node kind of
// both languages. Independent of the library's own corpus generator.

#include <random>
#include <string>
#include <vector>

#include "hasr/formula.hpp"
#include "hasr/syntax.hpp"

namespace hasr::fixtures {

class RandomAst {
 public:
  RandomAst(std::uint64_t seed, Language lang) : rng_(seed), lang_(lang) {}

  Formula formula(int depth) { return formula(depth, 0); }

  Term term(int depth) {
    const Sort ns = number_sort(lang_);
    int pick = below(depth <= 0 ? 3 : 8);
    switch (pick) {
      case 0: return Term::num(below(5));
      case 1: return Term::var(name(), ns);
      case 2:
        if (lang_ == Language::Target) return Term::real_const(std::string("c") + std::to_string(below(3)));
        return Term::var(name(), ns);
      case 3: return Term::add(term(depth - 1), term(depth - 1));
      case 4: return Term::mul(term(depth - 1), term(depth - 1));
      case 5: return Term::succ(term(depth - 1));
      case 6: return Term::pair(term(depth - 1), term(depth - 1));
      default: return Term::var(name(), ns);
    }
  }

 private:
  std::mt19937_64 rng_;
  Language lang_;

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string name() {
    static const char* names[] = {"x", "y", "z", "w", "x'", "n_1"};
    return names[below(6)];
  }
  SpeciesRef species() { return below(2) ? SpeciesRef::var(1 + below(3)) : SpeciesRef::constant(below(3)); }

  Formula formula(int depth, int) {
    const bool source = lang_ == Language::Source;
    if (depth <= 0) {
      switch (below(source ? 5 : 4)) {
        case 0: return Formula::bottom();
        case 1: return Formula::eq(term(2), term(2));
        case 2: return Formula::lt(term(2), term(2));
        case 3:
          if (source) return Formula::in(term(2), species());
          return Formula::apart(term(2), term(2));
        default: return below(2) ? Formula::in(term(1), species()) : Formula::species_eq(species(), species());
      }
    }
    switch (below(8)) {
      case 0: return Formula::conj(formula(depth - 1, 0), formula(depth - 1, 0));
      case 1: return Formula::disj(formula(depth - 1, 0), formula(depth - 1, 0));
      case 2: return Formula::implies(formula(depth - 1, 0), formula(depth - 1, 0));
      case 3: return Formula::negate(formula(depth - 1, 0));
      case 4: return Formula::exists(Var{name(), number_sort(lang_)}, formula(depth - 1, 0));
      case 5: return Formula::forall(Var{name(), number_sort(lang_)}, formula(depth - 1, 0));
      case 6:
        if (source) {
          Var x{species_var_name(1 + below(3)), Sort::Species};
          return below(2) ? Formula::exists(x, formula(depth - 1, 0)) : Formula::forall(x, formula(depth - 1, 0));
        }
        return Formula::defined(static_cast<DefinedKind>(below(4)), Var{name(), Sort::Real}, formula(depth - 1, 0));
      default: return formula(0, 0);
    }
  }
};

}  // namespace hasr::fixtures

namespace hasr::fixtures {

namespace detail {

using Binders = std::vector<std::pair<std::string, std::string>>;

inline bool same_var(const Var& a, const Var& b, const Binders& env) {
  if (a.sort != b.sort) return false;
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == a.name || it->second == b.name) return it->first == a.name && it->second == b.name;
  }
  return a.name == b.name;
}

inline bool alpha_term(const Term& a, const Term& b, const Binders& env) {
  if (const auto* x = a.as<Term::VarNode>()) {
    const auto* y = b.as<Term::VarNode>();
    return y && same_var(x->var, y->var, env);
  }
  if (const auto* x = a.as<Term::Binary>()) {
    const auto* y = b.as<Term::Binary>();
    return y && x->op == y->op && alpha_term(x->lhs, y->lhs, env) && alpha_term(x->rhs, y->rhs, env);
  }
  if (const auto* x = a.as<Term::Succ>()) {
    const auto* y = b.as<Term::Succ>();
    return y && alpha_term(x->arg, y->arg, env);
  }
  return a == b;
}

inline bool alpha_formula(const Formula& a, const Formula& b, Binders& env) {
  if (const auto* x = a.as<Formula::Atom>()) {
    const auto* y = b.as<Formula::Atom>();
    return y && x->kind == y->kind && alpha_term(x->lhs, y->lhs, env) && alpha_term(x->rhs, y->rhs, env);
  }
  if (const auto* x = a.as<Formula::In>()) {
    const auto* y = b.as<Formula::In>();
    return y && x->species == y->species && alpha_term(x->element, y->element, env);
  }
  if (const auto* x = a.as<Formula::Binary>()) {
    const auto* y = b.as<Formula::Binary>();
    return y && x->op == y->op && alpha_formula(x->lhs, y->lhs, env) && alpha_formula(x->rhs, y->rhs, env);
  }
  auto bound = [&](const Var& va, const Var& vb, const Formula& ba, const Formula& bb) {
    if (va.sort != vb.sort) return false;
    env.emplace_back(va.name, vb.name);
    bool ok = alpha_formula(ba, bb, env);
    env.pop_back();
    return ok;
  };
  if (const auto* x = a.as<Formula::Quant>()) {
    const auto* y = b.as<Formula::Quant>();
    // Species binders double as de Bruijn-free indices, so they must match exactly.
    if (!y || x->q != y->q) return false;
    if (x->var.sort == Sort::Species) return x->var == y->var && alpha_formula(x->body, y->body, env);
    return bound(x->var, y->var, x->body, y->body);
  }
  if (const auto* x = a.as<Formula::Defined>()) {
    const auto* y = b.as<Formula::Defined>();
    return y && x->kind == y->kind && bound(x->var, y->var, x->body, y->body);
  }
  return a == b;
}

}  // namespace detail

/// Equality up to renaming of bound number and real variables.
inline bool alpha_equal(const Formula& a, const Formula& b) {
  detail::Binders env;
  return detail::alpha_formula(a, b, env);
}

inline bool has_defined(const Formula& f) {
  if (f.as<Formula::Defined>()) return true;
  if (const auto* b = f.as<Formula::Binary>()) return has_defined(b->lhs) || has_defined(b->rhs);
  if (const auto* q = f.as<Formula::Quant>()) return has_defined(q->body);
  return false;
}

inline bool has_species_eq(const Formula& f) {
  if (f.as<Formula::SpeciesEq>()) return true;
  if (const auto* b = f.as<Formula::Binary>()) return has_species_eq(b->lhs) || has_species_eq(b->rhs);
  if (const auto* q = f.as<Formula::Quant>()) return has_species_eq(q->body);
  return false;
}

}  // namespace hasr::fixtures
