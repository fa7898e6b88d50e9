#include "hasr/translator.hpp"

#include <set>
#include <type_traits>
#include <variant>

#include "hasr/syntax.hpp"

namespace hasr {

namespace {

Term rvar(const std::string& name) { return Term::var(name, Sort::Real); }
Term rvar(const Var& v) { return Term::var(v.name, Sort::Real); }

std::set<std::size_t> species_indices(const Formula& f, SpeciesRef::Kind kind) {
  std::set<std::size_t> out;
  auto note = [&](const SpeciesRef& s) {
    if (s.kind == kind) out.insert(s.index);
  };
  auto go = [&](auto&& self, const Formula& g) -> void {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Formula::In>) {
            note(n.species);
          } else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) {
            note(n.lhs);
            note(n.rhs);
          } else if constexpr (std::is_same_v<T, Formula::Binary>) {
            self(self, n.lhs);
            self(self, n.rhs);
          } else if constexpr (std::is_same_v<T, Formula::Quant>) {
            if (kind == SpeciesRef::Kind::Variable && n.var.sort == Sort::Species)
              out.insert(*species_index_of(n.var.name));
            self(self, n.body);
          } else if constexpr (std::is_same_v<T, Formula::Defined>) {
            self(self, n.body);
          }
        },
        g.node());
  };
  go(go, f);
  return out;
}

bool binds(const Formula& f, const std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Binary>) {
          return binds(n.lhs, name) || binds(n.rhs, name);
        } else if constexpr (std::is_same_v<T, Formula::Quant> || std::is_same_v<T, Formula::Defined>) {
          return n.var.name == name || binds(n.body, name);
        } else {
          return false;
        }
      },
      f.node());
}

// Source number variables become real variables of the same name.
Term to_real(const Term& t) {
  return std::visit(
      [&](const auto& n) -> Term {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::VarNode>) {
          return rvar(n.var.name);
        } else if constexpr (std::is_same_v<T, Term::Numeral> || std::is_same_v<T, Term::RealConst>) {
          return t;
        } else if constexpr (std::is_same_v<T, Term::Binary>) {
          Term l = to_real(n.lhs), r = to_real(n.rhs);
          switch (n.op) {
            case TermOp::Add: return Term::add(l, r);
            case TermOp::Mul: return Term::mul(l, r);
            case TermOp::Pair: return Term::pair(l, r);
          }
          return t;
        } else {
          return Term::succ(to_real(n.arg));
        }
      },
      t.node());
}

struct Translator {
  const VarMap& vm;
  TranslationConfig cfg;
  NameSupply names;
  Formula phi;

  std::pair<Term, Term> species_pair(const SpeciesRef& s) const {
    if (s.is_var()) {
      const auto& [u, v] = vm.species_vars.at(s.index);
      return {rvar(u), rvar(v)};
    }
    const auto& [a, b] = vm.species_consts.at(s.index);
    return {Term::real_const(a), Term::real_const(b)};
  }

  Formula membership(const Term& n, const SpeciesRef& s) const {
    auto [u, v] = species_pair(s);
    Formula eq = cfg.orientation == Orientation::AsWritten ? Formula::eq(Term::mul(n, u), v)
                                                           : Formula::eq(Term::mul(n, v), u);
    return Formula::implies(Formula::negate(eq), phi);
  }

  Formula go(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> Formula {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Formula::Bottom>) {
            return phi;
          } else if constexpr (std::is_same_v<T, Formula::Atom>) {
            Term l = to_real(n.lhs), r = to_real(n.rhs);
            Formula atom = n.kind == AtomKind::Eq ? Formula::eq(l, r) : Formula::lt(l, r);
            return Formula::disj(atom, phi);
          } else if constexpr (std::is_same_v<T, Formula::In>) {
            return membership(to_real(n.element), n.species);
          } else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) {
            Var x{names.fresh("x"), Sort::Nat};
            Term xt = Term::var(x);
            return go(Formula::forall(x, Formula::iff(Formula::in(xt, n.lhs), Formula::in(xt, n.rhs))));
          } else if constexpr (std::is_same_v<T, Formula::Binary>) {
            Formula l = go(n.lhs), r = go(n.rhs);
            switch (n.op) {
              case Connective::And: return Formula::conj(l, r);
              case Connective::Or: return Formula::disj(l, r);
              case Connective::Implies: return Formula::implies(l, r);
            }
            return f;
          } else if constexpr (std::is_same_v<T, Formula::Quant>) {
            Formula body = go(n.body);
            const bool ex = n.q == Quantifier::Exists;
            if (n.var.sort == Sort::Species) {
              const auto& [u, v] = vm.species_vars.at(*species_index_of(n.var.name));
              DefinedKind k = ex ? DefinedKind::ExistsReal : DefinedKind::ForallReal;
              return Formula::defined(k, Var{u, Sort::Real}, Formula::defined(k, Var{v, Sort::Real}, body));
            }
            return Formula::defined(ex ? DefinedKind::ExistsNat : DefinedKind::ForallNat, Var{n.var.name, Sort::Real},
                                    body);
          } else {
            throw SortError("defined quantifier in a source formula", print(f));
          }
        },
        f.node());
  }
};

}  // namespace

VarMap VarMap::build(const Formula& f) {
  std::set<std::string> taken = all_names(f);
  for (const auto& c : real_constants(f)) taken.insert(c);
  NameSupply names(taken);
  VarMap vm;
  vm.sentinel = names.fresh("y");
  auto assign = [&](const std::string& a, const std::string& b) {
    auto first = names.fresh(a);
    return std::make_pair(first, names.fresh(b));
  };
  for (std::size_t i : species_indices(f, SpeciesRef::Kind::Variable))
    vm.species_vars[i] = assign("u" + std::to_string(i), "v" + std::to_string(i));
  for (std::size_t i : species_indices(f, SpeciesRef::Kind::Constant))
    vm.species_consts[i] = assign("a" + std::to_string(i), "b" + std::to_string(i));
  return vm;
}

void VarMap::validate(const Formula& f) const {
  for (std::size_t i : species_indices(f, SpeciesRef::Kind::Variable))
    if (!species_vars.count(i)) throw TranslationError("unmapped species variable X" + std::to_string(i));
  for (std::size_t i : species_indices(f, SpeciesRef::Kind::Constant))
    if (!species_consts.count(i)) throw TranslationError("unmapped species constant A" + std::to_string(i));

  if (binds(f, sentinel)) throw TranslationError("sentinel variable '" + sentinel + "' is captured by a binder");

  std::set<std::string> used = all_names(f);
  for (const auto& c : real_constants(f)) used.insert(c);
  std::set<std::string> assigned;
  auto claim = [&](const std::string& name) {
    if (used.count(name)) throw TranslationError("assigned name '" + name + "' already occurs in the formula");
    if (!assigned.insert(name).second) throw TranslationError("assigned name '" + name + "' is used twice");
  };
  claim(sentinel);
  for (const auto& [i, p] : species_vars) {
    claim(p.first);
    claim(p.second);
  }
  for (const auto& [i, p] : species_consts) {
    claim(p.first);
    claim(p.second);
  }
}

Formula sentinel_phi(const Var& y) {
  Term yt = rvar(y);
  return Formula::disj(Formula::eq(yt, Term::zero()), Formula::apart(yt, Term::zero()));
}

Formula sentinel_phi(const VarMap& vm) { return sentinel_phi(vm.sentinel_var()); }

namespace {

Formula phi_N_named(const Var& x, const Var& y, const Var& u, const Var& v, const Var& w, const Var& w2) {
  const Term X = rvar(x), U = rvar(u), V = rvar(v), W = rvar(w), W2 = rvar(w2), one = Term::one();
  const Formula B = sentinel_phi(y);
  auto not_ = [](Formula f) { return Formula::negate(std::move(f)); };

  Formula first = not_(Formula::lt(X, one));
  Formula second = Formula::implies(
      Formula::disj(not_(Formula::eq(V, U)), not_(Formula::eq(Term::mul(X, V), U))), B);
  Formula successor = Formula::exists(
      w2, Formula::implies(Formula::disj(Formula::apart(W, W2), not_(Formula::eq(Term::mul(W2, V), Term::add(U, V)))),
                           B));
  Formula third = Formula::forall(
      w, Formula::implies(Formula::implies(not_(Formula::eq(Term::mul(W, V), U)), B),
                          Formula::conj(Formula::implies(Formula::lt(W, one), B),
                                        Formula::implies(Formula::lt(one, W), successor))));
  return Formula::conj(first, Formula::conj(second, third));
}

}  // namespace

Formula phi_N(const Var& x, const Var& y, const Var& u, const Var& v) {
  for (const Var* p : {&x, &y, &u, &v})
    if (p->sort != Sort::Real) throw SortError("phi_N takes real variables", p->name);
  std::set<std::string> distinct{x.name, y.name, u.name, v.name};
  if (distinct.size() != 4) throw TranslationError("phi_N: the four variables must be distinct");

  NameSupply names(distinct);
  Var w{names.fresh("w"), Sort::Real};
  Var w2{names.fresh(w.name + "'"), Sort::Real};
  return phi_N_named(x, y, u, v, w, w2);
}

Formula psi(const Var& x, NameSupply& names) {
  if (x.sort != Sort::Real) throw SortError("psi takes a real variable", x.name);
  names.reserve(x.name);
  auto take = [&](const std::string& base) { return Var{names.fresh(base), Sort::Real}; };
  Var y = take("y"), u = take("u"), v = take("v"), w = take("w"), w2 = take("w'");
  return Formula::forall(y, Formula::exists(u, Formula::exists(v, phi_N_named(x, y, u, v, w, w2))));
}

Formula psi(const Var& x) {
  NameSupply names;
  return psi(x, names);
}

Formula expand_defined(const Formula& f, NameSupply& names) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Binary>) {
          Formula l = expand_defined(n.lhs, names), r = expand_defined(n.rhs, names);
          switch (n.op) {
            case Connective::And: return Formula::conj(l, r);
            case Connective::Or: return Formula::disj(l, r);
            case Connective::Implies: return Formula::implies(l, r);
          }
          return f;
        } else if constexpr (std::is_same_v<T, Formula::Quant>) {
          return Formula::quant(n.q, n.var, expand_defined(n.body, names));
        } else if constexpr (std::is_same_v<T, Formula::Defined>) {
          Formula body = expand_defined(n.body, names);
          switch (n.kind) {
            case DefinedKind::ExistsNat: return Formula::exists(n.var, Formula::conj(psi(n.var, names), body));
            case DefinedKind::ForallNat: return Formula::forall(n.var, Formula::implies(psi(n.var, names), body));
            case DefinedKind::ExistsReal: return Formula::exists(n.var, body);
            case DefinedKind::ForallReal: return Formula::forall(n.var, body);
          }
          return f;
        } else {
          return f;
        }
      },
      f.node());
}

Formula tau(const Formula& f, const VarMap& vm, TranslationConfig cfg) {
  check_language(f, Language::Source);
  vm.validate(f);

  std::set<std::string> used = all_names(f);
  for (const auto& c : real_constants(f)) used.insert(c);
  used.insert(vm.sentinel);
  for (const auto& [i, p] : vm.species_vars) used.insert({p.first, p.second});
  for (const auto& [i, p] : vm.species_consts) used.insert({p.first, p.second});

  Translator t{vm, cfg, NameSupply(used), sentinel_phi(vm)};
  Formula out = t.go(f);
  if (cfg.expansion == Expansion::Full) out = expand_defined(out, t.names);
  return out;
}

}  // namespace hasr
