#include "hasr/bounded_eval.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>
#include <type_traits>
#include <variant>

#include "hasr/syntax.hpp"

namespace hasr {

// ---------------------------------------------------------------------------
// Structure files

namespace {

natural read_natural(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw StructureError("structure line " + std::to_string(line) + ": expected a natural, got '" + tok + "'");
  try {
    return std::stoull(tok);
  } catch (const std::out_of_range&) {
    throw StructureError("structure line " + std::to_string(line) + ": natural out of range");
  }
}

std::vector<natural> read_naturals(std::istream& ls, std::size_t line) {
  std::vector<natural> out;
  std::string tok;
  while (ls >> tok) out.push_back(read_natural(tok, line));
  return out;
}

// Simulated runs realising a species member stop at this horizon.
constexpr natural realisation_horizon = 64;
constexpr std::uint64_t realisation_attempts = 10000;

}  // namespace

StructureSpec parse_structure(std::istream& in) {
  StructureSpec spec;
  bool saw_nat = false, saw_frac = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    auto fail = [&](const std::string& msg) {
      throw StructureError("structure line " + std::to_string(line) + ": " + msg);
    };
    if (key == "nat") {
      spec.nat_domain = read_naturals(ls, line);
      saw_nat = true;
    } else if (key == "real") {
      std::string kind;
      ls >> kind;
      auto values = read_naturals(ls, line);
      if (kind == "frac") {
        for (natural q : values)
          if (q == 0) fail("unit fraction 1/0");
        if (!saw_frac) spec.unit_fractions.clear();
        saw_frac = true;
        spec.unit_fractions.insert(spec.unit_fractions.end(), values.begin(), values.end());
      } else if (kind == "nat") {
        spec.extra_nats.insert(spec.extra_nats.end(), values.begin(), values.end());
      } else {
        fail("real expects 'frac' or 'nat'");
      }
    } else if (key == "species") {
      std::string idx;
      if (!(ls >> idx)) fail("species needs an index");
      auto members = read_naturals(ls, line);
      spec.species[read_natural(idx, line)] = std::set<natural>(members.begin(), members.end());
    } else if (key == "orientation") {
      std::string o;
      ls >> o;
      if (o == "as-written") spec.orientation = Orientation::AsWritten;
      else if (o == "normalized") spec.orientation = Orientation::QuotientNormalized;
      else fail("orientation must be as-written or normalized");
    } else if (key == "precision") {
      auto v = read_naturals(ls, line);
      if (v.size() != 2) fail("precision expects K H");
      spec.precision = Precision{v[0], v[1]};
    } else if (key == "sentinel") {
      if (!(ls >> spec.sentinel)) fail("sentinel needs a name");
    } else if (key == "encode-seed") {
      auto v = read_naturals(ls, line);
      if (v.size() != 1) fail("encode-seed expects one natural");
      spec.encode_seed = v[0];
    } else {
      fail("unknown directive '" + key + "'");
    }
  }
  if (!saw_nat) throw StructureError("structure has no nat directive");
  return spec;
}

void write_structure(std::ostream& out, const StructureSpec& spec) {
  auto list = [&](const auto& xs) {
    for (auto x : xs) out << ' ' << x;
  };
  out << "nat";
  list(spec.nat_domain);
  out << "\nreal frac";
  list(spec.unit_fractions);
  out << '\n';
  if (!spec.extra_nats.empty()) {
    out << "real nat";
    list(spec.extra_nats);
    out << '\n';
  }
  for (const auto& [i, members] : spec.species) {
    out << "species " << i;
    list(members);
    out << '\n';
  }
  out << "orientation " << (spec.orientation == Orientation::AsWritten ? "as-written" : "normalized") << '\n';
  out << "precision " << spec.precision.k << ' ' << spec.precision.horizon << '\n';
  out << "sentinel " << spec.sentinel << '\n';
  out << "encode-seed " << spec.encode_seed << '\n';
}

// ---------------------------------------------------------------------------
// Structures

FiniteStructure FiniteStructure::build(const StructureSpec& spec, SentinelMode mode) {
  FiniteStructure s;
  s.nat_domain = spec.nat_domain;
  s.sentinel_mode = mode;
  s.precision = spec.precision;
  s.orientation = spec.orientation;
  s.sentinel = spec.sentinel;
  s.species_assign = spec.species;

  std::set<natural> seen;
  for (natural n : spec.nat_domain)
    if (seen.insert(n).second) s.real_domain.push_back(from_nat(n));
  for (natural n : spec.extra_nats)
    if (seen.insert(n).second) s.real_domain.push_back(from_nat(n));
  std::set<natural> fracs;
  for (natural q : spec.unit_fractions) {
    if (q == 0) throw StructureError("unit fraction 1/0");
    // 1/1 is already f_1 when 1 is in the domain.
    if (q == 1 && seen.count(1)) continue;
    if (fracs.insert(q).second) s.real_domain.push_back(from_unit_fraction(q));
  }

  for (const auto& [i, members] : spec.species) {
    s.constant_names["a" + std::to_string(i)] = {i, true};
    s.constant_names["b" + std::to_string(i)] = {i, false};
    auto& out = s.species_encodings[i];
    for (natural k : members) {
      if (k == 0) throw StructureError("species A" + std::to_string(i) + ": members must be at least 1");
      if (k > realisation_horizon)
        throw StructureError("species A" + std::to_string(i) + ": member " + std::to_string(k) +
                             " exceeds the realisation horizon " + std::to_string(realisation_horizon));
      const ChoiceSeq alpha = ChoiceSeq::witnesses({{0, k}});
      std::optional<SimRun> found;
      for (std::uint64_t t = 0; t < realisation_attempts && !found; ++t) {
        SimRun r = run(alpha, Schedule::phi_at(1), realisation_horizon, spec.encode_seed + t);
        if (r.stabilized) found = std::move(r);
      }
      if (!found) throw StructureError("could not realise member " + std::to_string(k));
      out.push_back(Realisation{k, encode(*found)});
    }
  }
  s.verify();
  return s;
}

void FiniteStructure::adopt(const VarMap& vm) {
  sentinel = vm.sentinel;
  constant_names.clear();
  for (const auto& [i, names] : vm.species_consts) {
    constant_names[names.first] = {i, true};
    constant_names[names.second] = {i, false};
  }
}

void FiniteStructure::verify() const {
  if (nat_domain.empty()) throw StructureError("empty natural domain");
  if (real_domain.empty()) throw StructureError("empty real domain");
  for (natural n : nat_domain) {
    bool present = std::any_of(real_domain.begin(), real_domain.end(), [&](const RealGen& g) {
      return g.closed_form() && *g.closed_form() == Rational(Integer(static_cast<unsigned long>(n)));
    });
    if (!present) throw StructureError("real domain lacks f_" + std::to_string(n));
  }
  natural top = 20;
  for (natural n : nat_domain) top = std::max(top, n);
  for (const auto& [i, members] : species_assign)
    if (!members.empty()) top = std::max(top, *members.rbegin());

  for (const auto& [i, members] : species_assign) {
    auto it = species_encodings.find(i);
    std::set<natural> realised;
    if (it != species_encodings.end())
      for (const auto& r : it->second) realised.insert(r.member);
    if (realised != members) throw StructureError("species A" + std::to_string(i) + ": realisations do not match");
    if (it == species_encodings.end()) continue;
    for (const auto& r : it->second) {
      const auto& st = r.encoding.source_run.stabilized;
      if (!st || st->value != r.member) throw StructureError("realisation of " + std::to_string(r.member) + " is stale");
      if (precision.horizon < st->moment + precision.k + 8)
        throw StructureError("precision horizon " + std::to_string(precision.horizon) +
                             " is too short for an encoding stabilized at moment " + std::to_string(st->moment));
      for (natural n = 1; n <= top; ++n) {
        Quotient q = quotient_status(r.encoding, n, precision);
        Quotient want = n == r.member ? Quotient::Confirmed : Quotient::Excluded;
        if (q != want)
          throw StructureError("species A" + std::to_string(i) + ": quotient " + std::to_string(n) + " is " +
                               std::string(to_string(q)) + " for the realisation of " + std::to_string(r.member));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

enum class Order { Lt, Eq, Gt };

int exact_order(const Rational& a, const Rational& b) { return cmp(a, b); }

std::optional<natural> as_natural(const std::optional<Rational>& q) {
  if (!q || q->get_den() != 1 || *q < 0 || !q->get_num().fits_ulong_p()) return std::nullopt;
  return q->get_num().get_ui();
}

natural checked_add(natural a, natural b) {
  if (a > std::numeric_limits<natural>::max() - b) throw EvalError("natural overflow in +");
  return a + b;
}

natural checked_mul(natural a, natural b) {
  if (a != 0 && b > std::numeric_limits<natural>::max() / a) throw EvalError("natural overflow in *");
  return a * b;
}

void term_constants(const Term& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::RealConst>) out.insert(n.name);
        else if constexpr (std::is_same_v<T, Term::Binary>) {
          term_constants(n.lhs, out);
          term_constants(n.rhs, out);
        } else if constexpr (std::is_same_v<T, Term::Succ>) {
          term_constants(n.arg, out);
        }
      },
      t.node());
}

bool term_mentions(const Term& t, const std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::VarNode>) return n.var.name == name;
        else if constexpr (std::is_same_v<T, Term::Binary>) return term_mentions(n.lhs, name) || term_mentions(n.rhs, name);
        else if constexpr (std::is_same_v<T, Term::Succ>) return term_mentions(n.arg, name);
        else return false;
      },
      t.node());
}

}  // namespace

struct Evaluator::Impl {
  const FiniteStructure& s;
  std::map<natural, RealGen> nats;
  std::map<std::tuple<int, const void*, const void*>, RealGen> ops;
  std::map<std::pair<const void*, const void*>, Order> orders;
  std::optional<std::vector<SpeciesValue>> family;
  std::map<std::size_t, std::size_t> chosen;  // species index -> realisation in use
  Assignment env;
  std::size_t sentinel_bound = 0;

  explicit Impl(const FiniteStructure& st) : s(st) {}

  const RealGen& nat_gen(natural n) {
    auto it = nats.find(n);
    if (it == nats.end()) it = nats.emplace(n, from_nat(n)).first;
    return it->second;
  }

  RealGen op(int which, const RealGen& a, const RealGen& b) {
    auto key = std::make_tuple(which, a.id(), b.id());
    auto it = ops.find(key);
    if (it != ops.end()) return it->second;
    RealGen g = which == 0 ? add(a, b) : mul(a, b);
    ops.emplace(key, g);
    return g;
  }

  Order compare(const RealGen& a, const RealGen& b) {
    auto key = std::make_pair(a.id(), b.id());
    if (auto it = orders.find(key); it != orders.end()) return it->second;
    Order o;
    if (lt_at(a, b, s.precision)) o = Order::Lt;
    else if (lt_at(b, a, s.precision)) o = Order::Gt;
    else if (eq_at(a, b, s.precision)) o = Order::Eq;
    else throw PrecisionError("cannot order " + a.label() + " and " + b.label() + " at precision " +
                              std::to_string(s.precision.k) + ", horizon " + std::to_string(s.precision.horizon));
    if (a.closed_form() && b.closed_form()) {
      int e = exact_order(*a.closed_form(), *b.closed_form());
      Order exact = e < 0 ? Order::Lt : e > 0 ? Order::Gt : Order::Eq;
      if (exact != o)
        throw PrecisionError("bounded comparison of " + a.label() + " and " + b.label() +
                             " contradicts their exact values; raise the precision");
    }
    orders.emplace(key, o);
    return o;
  }

  natural nat_value(const Term& t) {
    return std::visit(
        [&](const auto& n) -> natural {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::VarNode>) {
            auto it = env.nat.find(n.var.name);
            if (it == env.nat.end()) throw EvalError("unbound variable " + n.var.name);
            return it->second;
          } else if constexpr (std::is_same_v<T, Term::Numeral>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, Term::RealConst>) {
            throw EvalError("real constant " + n.name + " in a natural-number term");
          } else if constexpr (std::is_same_v<T, Term::Binary>) {
            natural l = nat_value(n.lhs), r = nat_value(n.rhs);
            switch (n.op) {
              case TermOp::Add: return checked_add(l, r);
              case TermOp::Mul: return checked_mul(l, r);
              case TermOp::Pair:
                try {
                  return hasr::pair(l, r);
                } catch (const std::overflow_error& e) {
                  throw EvalError(e.what());
                }
            }
            return 0;
          } else {
            return checked_add(nat_value(n.arg), 1);
          }
        },
        t.node());
  }

  RealGen constant(const std::string& name) {
    auto it = s.constant_names.find(name);
    if (it == s.constant_names.end()) throw EvalError("unbound real constant " + name);
    auto [index, a_role] = it->second;
    auto pick = chosen.find(index);
    if (pick == chosen.end()) throw EvalError("no realisation selected for " + name);
    const EncodedSpecies& enc = s.species_encodings.at(index).at(pick->second).encoding;
    // As written the clause reads n*a = b, normalized n*b = a; either way the
    // quotient is b/a resp. a/b = member.
    bool use_v = (s.orientation == Orientation::AsWritten) == a_role;
    return use_v ? enc.v : enc.u;
  }

  RealGen real_value(const Term& t) {
    return std::visit(
        [&](const auto& n) -> RealGen {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::VarNode>) {
            if (n.var.sort == Sort::Nat) {
              auto it = env.nat.find(n.var.name);
              if (it == env.nat.end()) throw EvalError("unbound variable " + n.var.name);
              return nat_gen(it->second);
            }
            auto it = env.real.find(n.var.name);
            if (it == env.real.end()) throw EvalError("unbound variable " + n.var.name);
            return it->second;
          } else if constexpr (std::is_same_v<T, Term::Numeral>) {
            return nat_gen(n.value);
          } else if constexpr (std::is_same_v<T, Term::RealConst>) {
            return constant(n.name);
          } else if constexpr (std::is_same_v<T, Term::Binary>) {
            RealGen l = real_value(n.lhs), r = real_value(n.rhs);
            if (n.op == TermOp::Add) return op(0, l, r);
            if (n.op == TermOp::Mul) return op(1, l, r);
            auto p = as_natural(l.closed_form()), k = as_natural(r.closed_form());
            if (!p || !k) throw EvalError("pair applied to a real that is not a known natural");
            try {
              return nat_gen(hasr::pair(*p, *k));
            } catch (const std::overflow_error& e) {
              throw EvalError(e.what());
            }
          } else {
            return op(0, real_value(n.arg), nat_gen(1));
          }
        },
        t.node());
  }

  bool atom_once(const Formula::Atom& a) {
    const bool real = a.lhs.sort() == Sort::Real || a.rhs.sort() == Sort::Real;
    if (!real) {
      natural l = nat_value(a.lhs), r = nat_value(a.rhs);
      switch (a.kind) {
        case AtomKind::Eq: return l == r;
        case AtomKind::Lt: return l < r;
        case AtomKind::Apart: return l != r;
      }
    }
    Order o = compare(real_value(a.lhs), real_value(a.rhs));
    switch (a.kind) {
      case AtomKind::Eq: return o == Order::Eq;
      case AtomKind::Lt: return o == Order::Lt;
      case AtomKind::Apart: return o != Order::Eq;
    }
    return false;
  }

  // True under some choice of realisation for each species constant the
  // atom mentions.
  bool atom_some(const Formula::Atom& a, const std::vector<std::size_t>& indices, std::size_t depth) {
    if (depth == indices.size()) return atom_once(a);
    std::size_t index = indices[depth];
    auto it = s.species_encodings.find(index);
    if (it == s.species_encodings.end()) return false;
    for (std::size_t r = 0; r < it->second.size(); ++r) {
      chosen[index] = r;
      bool hit = atom_some(a, indices, depth + 1);
      chosen.erase(index);
      if (hit) return true;
    }
    return false;
  }

  bool atom(const Formula::Atom& a) {
    if (sentinel_bound == 0 && (term_mentions(a.lhs, s.sentinel) || term_mentions(a.rhs, s.sentinel)))
      return s.sentinel_mode == SentinelMode::PhiTrue;
    std::set<std::string> consts;
    term_constants(a.lhs, consts);
    term_constants(a.rhs, consts);
    if (consts.empty()) return atom_once(a);
    std::set<std::size_t> indices;
    for (const auto& c : consts) {
      auto it = s.constant_names.find(c);
      if (it == s.constant_names.end()) throw EvalError("unbound real constant " + c);
      indices.insert(it->second.first);
    }
    return atom_some(a, std::vector<std::size_t>(indices.begin(), indices.end()), 0);
  }

  SpeciesValue species_value(const SpeciesRef& r) {
    if (r.is_var()) {
      auto it = env.species.find(r.index);
      if (it == env.species.end()) throw EvalError("unbound species variable X" + std::to_string(r.index));
      return it->second;
    }
    auto it = s.species_assign.find(r.index);
    if (it == s.species_assign.end()) throw EvalError("unknown species constant A" + std::to_string(r.index));
    return SpeciesValue{false, it->second};
  }

  const std::vector<SpeciesValue>& species_family() {
    if (family) return *family;
    std::set<SpeciesValue> out;
    for (const auto& u : s.real_domain) {
      for (const auto& v : s.real_domain) {
        if (!u.closed_form() || !v.closed_form()) throw EvalError("real domain element without an exact value");
        // n * factor = target
        const Rational& factor = s.orientation == Orientation::AsWritten ? *u.closed_form() : *v.closed_form();
        const Rational& target = s.orientation == Orientation::AsWritten ? *v.closed_form() : *u.closed_form();
        SpeciesValue sv;
        if (factor == 0) {
          sv.all = target == 0;
        } else if (auto q = as_natural(Rational(target / factor))) {
          sv.members.insert(*q);
        }
        out.insert(sv);
      }
    }
    family.emplace(out.begin(), out.end());
    return *family;
  }

  template <class Map, class Key, class Value, class Body>
  bool with_binding(Map& m, const Key& key, const Value& value, Body&& body) {
    auto old = m.find(key);
    std::optional<typename Map::mapped_type> saved;
    if (old != m.end()) saved = old->second;
    m.insert_or_assign(key, value);
    bool result = body();
    if (saved) m.insert_or_assign(key, *saved);
    else m.erase(key);
    return result;
  }

  template <class Range, class Bind>
  bool quantify(bool exists, const Range& range, Bind&& bind_and_eval) {
    for (const auto& value : range) {
      bool r = bind_and_eval(value);
      if (exists && r) return true;
      if (!exists && !r) return false;
    }
    return !exists;
  }

  bool real_quantifier(bool exists, const std::string& name, const Formula& body, bool nat_range) {
    const bool shadows_sentinel = name == s.sentinel;
    if (shadows_sentinel) ++sentinel_bound;
    bool result;
    auto bind = [&](const RealGen& g) { return with_binding(env.real, name, g, [&] { return go(body); }); };
    if (nat_range) {
      std::vector<RealGen> gens;
      for (natural n : s.nat_domain) gens.push_back(nat_gen(n));
      result = quantify(exists, gens, bind);
    } else {
      result = quantify(exists, s.real_domain, bind);
    }
    if (shadows_sentinel) --sentinel_bound;
    return result;
  }

  bool go(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Formula::Bottom>) {
            return false;
          } else if constexpr (std::is_same_v<T, Formula::Atom>) {
            return atom(n);
          } else if constexpr (std::is_same_v<T, Formula::In>) {
            if (n.element.sort() == Sort::Real) throw EvalError("membership of a real term");
            return species_value(n.species).contains(nat_value(n.element));
          } else if constexpr (std::is_same_v<T, Formula::SpeciesEq>) {
            SpeciesValue a = species_value(n.lhs), b = species_value(n.rhs);
            return std::all_of(s.nat_domain.begin(), s.nat_domain.end(),
                               [&](natural x) { return a.contains(x) == b.contains(x); });
          } else if constexpr (std::is_same_v<T, Formula::Binary>) {
            switch (n.op) {
              case Connective::And: return go(n.lhs) && go(n.rhs);
              case Connective::Or: return go(n.lhs) || go(n.rhs);
              case Connective::Implies: return !go(n.lhs) || go(n.rhs);
            }
            return false;
          } else if constexpr (std::is_same_v<T, Formula::Quant>) {
            const bool ex = n.q == Quantifier::Exists;
            switch (n.var.sort) {
              case Sort::Nat:
                return quantify(ex, s.nat_domain, [&](natural v) {
                  return with_binding(env.nat, n.var.name, v, [&] { return go(n.body); });
                });
              case Sort::Real:
                return real_quantifier(ex, n.var.name, n.body, false);
              case Sort::Species: {
                std::size_t index = *species_index_of(n.var.name);
                return quantify(ex, species_family(), [&](const SpeciesValue& v) {
                  return with_binding(env.species, index, v, [&] { return go(n.body); });
                });
              }
            }
            return false;
          } else {
            const bool ex = n.kind == DefinedKind::ExistsNat || n.kind == DefinedKind::ExistsReal;
            const bool nat_range = n.kind == DefinedKind::ExistsNat || n.kind == DefinedKind::ForallNat;
            return real_quantifier(ex, n.var.name, n.body, nat_range);
          }
        },
        f.node());
  }
};

Evaluator::Evaluator(const FiniteStructure& s) : impl_(std::make_unique<Impl>(s)) {}
Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;

bool Evaluator::eval(const Formula& f, const Assignment& env) {
  impl_->env = env;
  impl_->sentinel_bound = env.real.count(impl_->s.sentinel) ? 1 : 0;
  impl_->chosen.clear();
  return impl_->go(f);
}

const std::vector<SpeciesValue>& Evaluator::species_family() { return impl_->species_family(); }

bool eval(const Formula& f, const FiniteStructure& s, const Assignment& env) {
  Evaluator e(s);
  return e.eval(f, env);
}

}  // namespace hasr
