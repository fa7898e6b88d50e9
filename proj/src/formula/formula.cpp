#include "hasr/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <functional>
#include <vector>

#include "hasr/syntax.hpp"

namespace hasr {

std::string_view to_string(Sort s) {
  switch (s) {
    case Sort::Nat: return "Nat";
    case Sort::Species: return "Species";
    case Sort::Real: return "Real";
  }
  return "?";
}

std::optional<Sort> sort_from_string(std::string_view s) {
  if (s == "Nat") return Sort::Nat;
  if (s == "Species") return Sort::Species;
  if (s == "Real") return Sort::Real;
  return std::nullopt;
}

std::string species_var_name(std::size_t index) { return "X" + std::to_string(index); }

std::optional<std::size_t> species_index_of(std::string_view name) {
  if (name.size() < 2 || name[0] != 'X') return std::nullopt;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), value);
  if (ec != std::errc{} || ptr != name.data() + name.size()) return std::nullopt;
  if (name.size() > 2 && name[1] == '0') return std::nullopt;
  return value;
}

std::string_view keyword(DefinedKind k) {
  switch (k) {
    case DefinedKind::ExistsNat: return "existsN";
    case DefinedKind::ForallNat: return "forallN";
    case DefinedKind::ExistsReal: return "existsR";
    case DefinedKind::ForallReal: return "forallR";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Term construction

namespace {

std::optional<Sort> unify_number_sorts(const Term& a, const Term& b, std::string_view op) {
  auto sa = a.sort();
  auto sb = b.sort();
  if (sa && sb && *sa != *sb) {
    throw SortError(std::string(op) + " arguments have different sorts",
                    print(a) + " : " + std::string(to_string(*sa)) + " vs " + print(b) + " : " +
                        std::string(to_string(*sb)));
  }
  return sa ? sa : sb;
}

}  // namespace

Term Term::var(std::string name, Sort sort) {
  if (name.empty()) throw SortError("empty variable name", "");
  if (sort == Sort::Species) throw SortError("species variable used as a term", name);
  return Term(std::make_shared<const Node>(VarNode{Var{std::move(name), sort}}), sort);
}

Term Term::num(natural n) { return Term(std::make_shared<const Node>(Numeral{n}), std::nullopt); }

Term Term::real_const(std::string name) {
  if (name.empty()) throw SortError("empty constant name", "");
  return Term(std::make_shared<const Node>(RealConst{std::move(name)}), Sort::Real);
}

Term Term::add(Term a, Term b) {
  auto s = unify_number_sorts(a, b, "+");
  return Term(std::make_shared<const Node>(Binary{TermOp::Add, std::move(a), std::move(b)}), s);
}

Term Term::mul(Term a, Term b) {
  auto s = unify_number_sorts(a, b, "*");
  return Term(std::make_shared<const Node>(Binary{TermOp::Mul, std::move(a), std::move(b)}), s);
}

Term Term::pair(Term a, Term b) {
  auto s = unify_number_sorts(a, b, "pair");
  return Term(std::make_shared<const Node>(Binary{TermOp::Pair, std::move(a), std::move(b)}), s);
}

Term Term::succ(Term a) {
  auto s = a.sort();
  return Term(std::make_shared<const Node>(Succ{std::move(a)}), s);
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->index() != b.node_->index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(*b.node_);
        if constexpr (std::is_same_v<T, Term::VarNode>) return x.var == y.var;
        else if constexpr (std::is_same_v<T, Term::Numeral>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, Term::RealConst>) return x.name == y.name;
        else if constexpr (std::is_same_v<T, Term::Binary>) return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
        else return x.arg == y.arg;
      },
      *a.node_);
}

// ---------------------------------------------------------------------------
// Formula construction

Formula Formula::bottom() {
  static const Formula b(std::make_shared<const Node>(Bottom{}));
  return b;
}

namespace {

void check_atom_sides(const Term& a, const Term& b, std::string_view what) {
  unify_number_sorts(a, b, what);
}

}  // namespace

Formula Formula::eq(Term a, Term b) {
  check_atom_sides(a, b, "=");
  return Formula(std::make_shared<const Node>(Atom{AtomKind::Eq, std::move(a), std::move(b)}));
}

Formula Formula::lt(Term a, Term b) {
  check_atom_sides(a, b, "<");
  return Formula(std::make_shared<const Node>(Atom{AtomKind::Lt, std::move(a), std::move(b)}));
}

Formula Formula::apart(Term a, Term b) {
  check_atom_sides(a, b, "apart");
  return Formula(std::make_shared<const Node>(Atom{AtomKind::Apart, std::move(a), std::move(b)}));
}

Formula Formula::in(Term t, SpeciesRef s) {
  if (t.sort() && *t.sort() != Sort::Nat) {
    throw SortError("species membership needs a Nat element", print(t));
  }
  return Formula(std::make_shared<const Node>(In{std::move(t), s}));
}

Formula Formula::species_eq(SpeciesRef a, SpeciesRef b) {
  return Formula(std::make_shared<const Node>(SpeciesEq{a, b}));
}

Formula Formula::conj(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Binary{Connective::And, std::move(a), std::move(b)}));
}

Formula Formula::disj(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Binary{Connective::Or, std::move(a), std::move(b)}));
}

Formula Formula::implies(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Binary{Connective::Implies, std::move(a), std::move(b)}));
}

Formula Formula::iff(const Formula& a, const Formula& b) { return conj(implies(a, b), implies(b, a)); }

Formula Formula::quant(Quantifier q, Var v, Formula body) {
  if (v.name.empty()) throw SortError("empty bound variable name", "");
  if (v.sort == Sort::Species && !species_index_of(v.name)) {
    throw SortError("species binder must be named X<index>", v.name);
  }
  return Formula(std::make_shared<const Node>(Quant{q, std::move(v), std::move(body)}));
}

Formula Formula::exists(Var v, Formula body) { return quant(Quantifier::Exists, std::move(v), std::move(body)); }
Formula Formula::forall(Var v, Formula body) { return quant(Quantifier::Forall, std::move(v), std::move(body)); }

Formula Formula::defined(DefinedKind k, Var v, Formula body) {
  if (v.sort != Sort::Real) throw SortError("defined quantifiers bind Real variables", v.name);
  return Formula(std::make_shared<const Node>(Defined{k, std::move(v), std::move(body)}));
}

std::optional<Formula> Formula::negated() const {
  if (auto b = as<Binary>(); b && b->op == Connective::Implies && b->rhs.is_bottom()) return b->lhs;
  return std::nullopt;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->index() != b.node_->index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(*b.node_);
        if constexpr (std::is_same_v<T, Formula::Bottom>) return true;
        else if constexpr (std::is_same_v<T, Formula::Atom>) return x.kind == y.kind && x.lhs == y.lhs && x.rhs == y.rhs;
        else if constexpr (std::is_same_v<T, Formula::In>) return x.element == y.element && x.species == y.species;
        else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) return x.lhs == y.lhs && x.rhs == y.rhs;
        else if constexpr (std::is_same_v<T, Formula::Binary>) return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
        else if constexpr (std::is_same_v<T, Formula::Quant>) return x.q == y.q && x.var == y.var && x.body == y.body;
        else return x.kind == y.kind && x.var == y.var && x.body == y.body;
      },
      *a.node_);
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

struct Scope {
  std::vector<Var> vars;
  std::vector<std::size_t> species;

  bool binds(const Var& v) const { return std::find(vars.begin(), vars.end(), v) != vars.end(); }
  bool binds_species(std::size_t i) const {
    return std::find(species.begin(), species.end(), i) != species.end();
  }
};

void collect_term(const Term& t, const Scope& scope, FreeVars& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::VarNode>) {
          if (scope.binds(n.var)) return;
          (n.var.sort == Sort::Real ? out.real : out.nat).insert(n.var.name);
        } else if constexpr (std::is_same_v<T, Term::Binary>) {
          collect_term(n.lhs, scope, out);
          collect_term(n.rhs, scope, out);
        } else if constexpr (std::is_same_v<T, Term::Succ>) {
          collect_term(n.arg, scope, out);
        }
      },
      t.node());
}

void collect_species(const SpeciesRef& s, const Scope& scope, FreeVars& out) {
  if (s.is_var() && !scope.binds_species(s.index)) out.species.insert(s.index);
}

void collect(const Formula& f, Scope& scope, FreeVars& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Atom>) {
          collect_term(n.lhs, scope, out);
          collect_term(n.rhs, scope, out);
        } else if constexpr (std::is_same_v<T, Formula::In>) {
          collect_term(n.element, scope, out);
          collect_species(n.species, scope, out);
        } else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) {
          collect_species(n.lhs, scope, out);
          collect_species(n.rhs, scope, out);
        } else if constexpr (std::is_same_v<T, Formula::Binary>) {
          collect(n.lhs, scope, out);
          collect(n.rhs, scope, out);
        } else if constexpr (std::is_same_v<T, Formula::Quant> || std::is_same_v<T, Formula::Defined>) {
          if (n.var.sort == Sort::Species) {
            scope.species.push_back(*species_index_of(n.var.name));
            collect(n.body, scope, out);
            scope.species.pop_back();
          } else {
            scope.vars.push_back(n.var);
            collect(n.body, scope, out);
            scope.vars.pop_back();
          }
        }
      },
      f.node());
}

void term_names(const Term& t, std::set<std::string>& out, std::set<std::string>* consts) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::VarNode>) {
          out.insert(n.var.name);
        } else if constexpr (std::is_same_v<T, Term::RealConst>) {
          if (consts) consts->insert(n.name);
        } else if constexpr (std::is_same_v<T, Term::Binary>) {
          term_names(n.lhs, out, consts);
          term_names(n.rhs, out, consts);
        } else if constexpr (std::is_same_v<T, Term::Succ>) {
          term_names(n.arg, out, consts);
        }
      },
      t.node());
}

template <class TermFn, class BinderFn, class SpeciesFn>
void walk(const Formula& f, TermFn&& on_term, BinderFn&& on_binder, SpeciesFn&& on_species) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Atom>) {
          on_term(n.lhs);
          on_term(n.rhs);
        } else if constexpr (std::is_same_v<T, Formula::In>) {
          on_term(n.element);
          on_species(n.species);
        } else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) {
          on_species(n.lhs);
          on_species(n.rhs);
        } else if constexpr (std::is_same_v<T, Formula::Binary>) {
          walk(n.lhs, on_term, on_binder, on_species);
          walk(n.rhs, on_term, on_binder, on_species);
        } else if constexpr (std::is_same_v<T, Formula::Quant> || std::is_same_v<T, Formula::Defined>) {
          on_binder(n.var);
          walk(n.body, on_term, on_binder, on_species);
        }
      },
      f.node());
}

}  // namespace

FreeVars free_vars(const Formula& f) {
  FreeVars out;
  Scope scope;
  collect(f, scope, out);
  return out;
}

FreeVars free_vars(const Term& t) {
  FreeVars out;
  collect_term(t, Scope{}, out);
  return out;
}

std::set<std::string> real_constants(const Formula& f) {
  std::set<std::string> names, consts;
  walk(f, [&](const Term& t) { term_names(t, names, &consts); }, [](const Var&) {}, [](const SpeciesRef&) {});
  return consts;
}

std::set<std::string> all_names(const Formula& f) {
  std::set<std::string> names;
  walk(f, [&](const Term& t) { term_names(t, names, nullptr); }, [&](const Var& v) { names.insert(v.name); },
       [](const SpeciesRef&) {});
  return names;
}

std::optional<std::size_t> max_species_index(const Formula& f) {
  std::optional<std::size_t> best;
  auto bump = [&](std::size_t i) { best = best ? std::max(*best, i) : i; };
  walk(
      f, [](const Term&) {},
      [&](const Var& v) {
        if (v.sort == Sort::Species) bump(*species_index_of(v.name));
      },
      [&](const SpeciesRef& s) { bump(s.index); });
  return best;
}

// ---------------------------------------------------------------------------
// Fresh names

std::string NameSupply::fresh(const std::string& base) {
  if (!used(base)) {
    used_.insert(base);
    return base;
  }
  return fresh_suffixed(base);
}

std::string NameSupply::fresh_suffixed(const std::string& base) {
  for (std::size_t i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!used(candidate)) {
      used_.insert(candidate);
      return candidate;
    }
  }
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

bool is_free_in_term(const Var& v, const Term& t) {
  auto fv = free_vars(t);
  return (v.sort == Sort::Real ? fv.real : fv.nat).count(v.name) != 0;
}

bool is_free_in(const Var& v, const Formula& f) {
  auto fv = free_vars(f);
  return (v.sort == Sort::Real ? fv.real : fv.nat).count(v.name) != 0;
}

Formula rebind(const Formula& original, Var v, Formula body) {
  if (auto q = original.as<Formula::Quant>()) return Formula::quant(q->q, std::move(v), std::move(body));
  const auto* d = original.as<Formula::Defined>();
  return Formula::defined(d->kind, std::move(v), std::move(body));
}

Formula subst(const Formula& f, const Var& v, const Term& t) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Bottom> || std::is_same_v<T, Formula::SpeciesEq>) {
          return f;
        } else if constexpr (std::is_same_v<T, Formula::Atom>) {
          Term l = substitute(n.lhs, v, t);
          Term r = substitute(n.rhs, v, t);
          switch (n.kind) {
            case AtomKind::Eq: return Formula::eq(l, r);
            case AtomKind::Lt: return Formula::lt(l, r);
            case AtomKind::Apart: return Formula::apart(l, r);
          }
          return f;
        } else if constexpr (std::is_same_v<T, Formula::In>) {
          return Formula::in(substitute(n.element, v, t), n.species);
        } else if constexpr (std::is_same_v<T, Formula::Binary>) {
          Formula l = subst(n.lhs, v, t);
          Formula r = subst(n.rhs, v, t);
          switch (n.op) {
            case Connective::And: return Formula::conj(l, r);
            case Connective::Or: return Formula::disj(l, r);
            case Connective::Implies: return Formula::implies(l, r);
          }
          return f;
        } else {
          // Quant and Defined share binder handling.
          const Var& bound = n.var;
          if (bound == v || !is_free_in(v, n.body)) return f;
          if (bound.sort != Sort::Species && is_free_in_term(bound, t)) {
            NameSupply names(all_names(n.body));
            auto tv = free_vars(t);
            names.reserve(tv.nat);
            names.reserve(tv.real);
            names.reserve(v.name);
            Var renamed{names.fresh_suffixed(bound.name), bound.sort};
            Formula body = subst(n.body, bound, Term::var(renamed));
            return rebind(f, renamed, subst(body, v, t));
          }
          return rebind(f, bound, subst(n.body, v, t));
        }
      },
      f.node());
}

}  // namespace

Term substitute(const Term& in, const Var& v, const Term& t) {
  return std::visit(
      [&](const auto& n) -> Term {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::VarNode>) {
          return n.var == v ? t : in;
        } else if constexpr (std::is_same_v<T, Term::Binary>) {
          Term l = substitute(n.lhs, v, t);
          Term r = substitute(n.rhs, v, t);
          switch (n.op) {
            case TermOp::Add: return Term::add(l, r);
            case TermOp::Mul: return Term::mul(l, r);
            case TermOp::Pair: return Term::pair(l, r);
          }
          return in;
        } else if constexpr (std::is_same_v<T, Term::Succ>) {
          return Term::succ(substitute(n.arg, v, t));
        } else {
          return in;
        }
      },
      in.node());
}

Formula substitute(const Formula& f, const Var& v, const Term& t) {
  if (v.sort == Sort::Species) throw SortError("use substitute_species for species variables", v.name);
  if (t.sort() && *t.sort() != v.sort) {
    throw SortError("substituted term has sort " + std::string(to_string(*t.sort())) + ", variable has " +
                        std::string(to_string(v.sort)),
                    print(t));
  }
  return subst(f, v, t);
}

namespace {

SpeciesRef swap_ref(const SpeciesRef& s, std::size_t index, SpeciesRef with) {
  return (s.is_var() && s.index == index) ? with : s;
}

bool species_free_in(std::size_t index, const Formula& f) { return free_vars(f).species.count(index) != 0; }

Formula subst_species(const Formula& f, std::size_t index, SpeciesRef with, std::size_t& next_fresh) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::In>) {
          return Formula::in(n.element, swap_ref(n.species, index, with));
        } else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) {
          return Formula::species_eq(swap_ref(n.lhs, index, with), swap_ref(n.rhs, index, with));
        } else if constexpr (std::is_same_v<T, Formula::Binary>) {
          Formula l = subst_species(n.lhs, index, with, next_fresh);
          Formula r = subst_species(n.rhs, index, with, next_fresh);
          switch (n.op) {
            case Connective::And: return Formula::conj(l, r);
            case Connective::Or: return Formula::disj(l, r);
            case Connective::Implies: return Formula::implies(l, r);
          }
          return f;
        } else if constexpr (std::is_same_v<T, Formula::Quant> || std::is_same_v<T, Formula::Defined>) {
          if (n.var.sort != Sort::Species) {
            return rebind(f, n.var, subst_species(n.body, index, with, next_fresh));
          }
          std::size_t bound = *species_index_of(n.var.name);
          if (bound == index || !species_free_in(index, n.body)) return f;
          if (with.is_var() && with.index == bound) {
            std::size_t renamed = next_fresh++;
            Formula body = subst_species(n.body, bound, SpeciesRef::var(renamed), next_fresh);
            return rebind(f, Var{species_var_name(renamed), Sort::Species},
                          subst_species(body, index, with, next_fresh));
          }
          return rebind(f, n.var, subst_species(n.body, index, with, next_fresh));
        } else {
          return f;
        }
      },
      f.node());
}

}  // namespace

Formula substitute_species(const Formula& f, std::size_t index, SpeciesRef with) {
  std::size_t next = std::max(max_species_index(f).value_or(0), std::max(index, with.index)) + 1;
  return subst_species(f, index, with, next);
}

// ---------------------------------------------------------------------------
// Pairing

natural pair(natural p, natural k) {
  natural s = p + k;
  if (s < p) throw std::overflow_error("pair: overflow");
  unsigned __int128 tri = static_cast<unsigned __int128>(s) * (s + 1) / 2 + k;
  if (tri > std::numeric_limits<natural>::max()) throw std::overflow_error("pair: overflow");
  return static_cast<natural>(tri);
}

std::pair<natural, natural> unpair(natural z) {
  // Largest w with w(w+1)/2 <= z.
  auto tri = [](unsigned __int128 w) { return w * (w + 1) / 2; };
  unsigned __int128 w = static_cast<unsigned __int128>(std::sqrt(2.0 * static_cast<double>(z)));
  while (tri(w) > z) --w;
  while (tri(w + 1) <= z) ++w;
  natural k = static_cast<natural>(z - tri(w));
  natural p = static_cast<natural>(w) - k;
  return {p, k};
}

}  // namespace hasr
