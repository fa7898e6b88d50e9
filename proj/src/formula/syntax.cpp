#include "hasr/syntax.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <vector>

namespace hasr {

std::string_view to_string(Language l) { return l == Language::Source ? "source" : "target"; }

Sort number_sort(Language l) { return l == Language::Source ? Sort::Nat : Sort::Real; }

SyntaxError::SyntaxError(const std::string& msg, std::size_t offset, std::size_t line, std::size_t column)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      offset_(offset),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  enum Kind { Open, Close, Atom, End } kind;
  std::string_view text;
  std::size_t offset;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src_.size()) {
      char c = src_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == ';') {
        while (i < src_.size() && src_[i] != '\n') ++i;
      } else if (c == '(') {
        out.push_back({Token::Open, src_.substr(i, 1), i});
        ++i;
      } else if (c == ')') {
        out.push_back({Token::Close, src_.substr(i, 1), i});
        ++i;
      } else {
        std::size_t start = i;
        while (i < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i])) && src_[i] != '(' &&
               src_[i] != ')' && src_[i] != ';')
          ++i;
        out.push_back({Token::Atom, src_.substr(start, i - start), start});
      }
    }
    out.push_back({Token::End, {}, src_.size()});
    return out;
  }

 private:
  std::string_view src_;
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
  }
  return true;
}

std::optional<natural> to_natural(std::string_view s) {
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s[0]))) return std::nullopt;
  natural v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

class Parser {
 public:
  Parser(std::string_view src, Language lang) : src_(src), lang_(lang), toks_(Lexer(src).run()) {}

  Formula formula_only() {
    Formula f = formula();
    expect_end();
    return f;
  }

  Term term_only() {
    Term t = term();
    expect_end();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, offset, line, col);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expect(Token::Kind k, const char* what) {
    const Token& t = next();
    if (t.kind != k) fail(std::string("expected ") + what, t.offset);
  }

  std::string_view atom(const char* what) {
    const Token& t = next();
    if (t.kind != Token::Atom) fail(std::string("expected ") + what, t.offset);
    return t.text;
  }

  void expect_end() {
    if (peek().kind != Token::End) fail("unexpected trailing input", peek().offset);
  }

  Sort sort_name(std::string_view s, std::size_t offset) {
    auto sort = sort_from_string(s);
    if (!sort) fail("unknown sort '" + std::string(s) + "'", offset);
    return *sort;
  }

  std::size_t index(std::string_view s, std::size_t offset) {
    auto v = to_natural(s);
    if (!v) fail("expected a species index", offset);
    return static_cast<std::size_t>(*v);
  }

  Sort resolve(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name == name) return it->sort;
    }
    return number_sort(lang_);
  }

  Formula formula() {
    expect(Token::Open, "'('");
    std::size_t head_at = peek().offset;
    std::string_view head = atom("a formula keyword");
    Formula f = formula_body(head, head_at);
    expect(Token::Close, "')'");
    return f;
  }

  Formula formula_body(std::string_view head, std::size_t at) {
    if (head == "bot") return Formula::bottom();
    if (head == "=" || head == "<" || head == "apart") {
      Term a = term();
      Term b = term();
      if (head == "=") return Formula::eq(a, b);
      if (head == "<") return Formula::lt(a, b);
      return Formula::apart(a, b);
    }
    if (head == "in") {
      Term t = term();
      return Formula::in(t, species());
    }
    if (head == "seq") {
      SpeciesRef a = species();
      return Formula::species_eq(a, species());
    }
    if (head == "and" || head == "or" || head == "imp") {
      Formula a = formula();
      Formula b = formula();
      if (head == "and") return Formula::conj(a, b);
      if (head == "or") return Formula::disj(a, b);
      return Formula::implies(a, b);
    }
    if (head == "not") return Formula::negate(formula());
    if (head == "forall" || head == "exists") {
      expect(Token::Open, "'(' before binder");
      std::size_t name_at = peek().offset;
      std::string name(atom("a bound variable"));
      if (!is_identifier(name)) fail("bad variable name '" + name + "'", name_at);
      std::size_t sort_at = peek().offset;
      Sort s = sort_name(atom("a sort"), sort_at);
      expect(Token::Close, "')' after binder");
      if (s == Sort::Species && !species_index_of(name)) fail("species binders are named X<index>", name_at);
      scope_.push_back(Var{name, s});
      Formula body = formula();
      scope_.pop_back();
      return Formula::quant(head == "forall" ? Quantifier::Forall : Quantifier::Exists, Var{name, s}, body);
    }
    for (DefinedKind k : {DefinedKind::ExistsNat, DefinedKind::ForallNat, DefinedKind::ExistsReal,
                          DefinedKind::ForallReal}) {
      if (head != keyword(k)) continue;
      expect(Token::Open, "'(' before binder");
      std::size_t name_at = peek().offset;
      std::string name(atom("a bound variable"));
      if (!is_identifier(name)) fail("bad variable name '" + name + "'", name_at);
      expect(Token::Close, "')' after binder");
      scope_.push_back(Var{name, Sort::Real});
      Formula body = formula();
      scope_.pop_back();
      return Formula::defined(k, Var{name, Sort::Real}, body);
    }
    fail("unknown formula keyword '" + std::string(head) + "'", at);
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Token::Atom) {
      next();
      if (auto n = to_natural(t.text)) return Term::num(*n);
      if (!is_identifier(t.text)) fail("bad term '" + std::string(t.text) + "'", t.offset);
      return Term::var(std::string(t.text), resolve(t.text));
    }
    expect(Token::Open, "a term");
    std::size_t head_at = peek().offset;
    std::string_view head = atom("a term operator");
    Term result = Term::zero();
    if (head == "+" || head == "*" || head == "pair") {
      Term a = term();
      Term b = term();
      result = head == "+" ? Term::add(a, b) : head == "*" ? Term::mul(a, b) : Term::pair(a, b);
    } else if (head == "succ") {
      result = Term::succ(term());
    } else if (head == "var") {
      std::size_t name_at = peek().offset;
      std::string name(atom("a variable name"));
      if (!is_identifier(name)) fail("bad variable name '" + name + "'", name_at);
      std::size_t sort_at = peek().offset;
      Sort s = sort_name(atom("a sort"), sort_at);
      if (s == Sort::Species) fail("species variables are not terms", sort_at);
      result = Term::var(name, s);
    } else if (head == "rconst") {
      std::size_t name_at = peek().offset;
      std::string name(atom("a constant name"));
      if (!is_identifier(name)) fail("bad constant name '" + name + "'", name_at);
      result = Term::real_const(name);
    } else {
      fail("unknown term operator '" + std::string(head) + "'", head_at);
    }
    expect(Token::Close, "')'");
    return result;
  }

  SpeciesRef species() {
    expect(Token::Open, "a species reference");
    std::size_t head_at = peek().offset;
    std::string_view head = atom("svar or sconst");
    std::size_t idx_at = peek().offset;
    std::size_t i = index(atom("a species index"), idx_at);
    expect(Token::Close, "')'");
    if (head == "svar") return SpeciesRef::var(i);
    if (head == "sconst") return SpeciesRef::constant(i);
    fail("expected svar or sconst", head_at);
  }

  std::string_view src_;
  Language lang_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Var> scope_;
};

// ---------------------------------------------------------------------------
// Printing

class Printer {
 public:
  Printer(Language lang, PrintOptions opts) : lang_(lang), opts_(opts) {}

  void formula(const Formula& f) {
    std::visit([&](const auto& n) { node(n); }, f.node());
  }

  void term(const Term& t) {
    std::visit([&](const auto& n) { term_node(n); }, t.node());
  }

  std::string str() const { return out_.str(); }

 private:
  void node(const Formula::Bottom&) { out_ << "(bot)"; }

  void node(const Formula::Atom& a) {
    if (a.kind == AtomKind::Apart && opts_.unfold_apart) {
      out_ << "(or (< ";
      term(a.lhs);
      out_ << ' ';
      term(a.rhs);
      out_ << ") (< ";
      term(a.rhs);
      out_ << ' ';
      term(a.lhs);
      out_ << "))";
      return;
    }
    out_ << '(' << (a.kind == AtomKind::Eq ? "=" : a.kind == AtomKind::Lt ? "<" : "apart") << ' ';
    term(a.lhs);
    out_ << ' ';
    term(a.rhs);
    out_ << ')';
  }

  void node(const Formula::In& n) {
    out_ << "(in ";
    term(n.element);
    out_ << ' ';
    species(n.species);
    out_ << ')';
  }

  void node(const Formula::SpeciesEq& n) {
    out_ << "(seq ";
    species(n.lhs);
    out_ << ' ';
    species(n.rhs);
    out_ << ')';
  }

  void node(const Formula::Binary& b) {
    if (b.op == Connective::Implies && b.rhs.is_bottom()) {
      out_ << "(not ";
      formula(b.lhs);
      out_ << ')';
      return;
    }
    out_ << '(' << (b.op == Connective::And ? "and" : b.op == Connective::Or ? "or" : "imp") << ' ';
    formula(b.lhs);
    out_ << ' ';
    formula(b.rhs);
    out_ << ')';
  }

  void node(const Formula::Quant& q) {
    out_ << '(' << (q.q == Quantifier::Forall ? "forall" : "exists") << " (" << q.var.name << ' '
         << to_string(q.var.sort) << ") ";
    scope_.push_back(q.var);
    formula(q.body);
    scope_.pop_back();
    out_ << ')';
  }

  void node(const Formula::Defined& d) {
    out_ << '(' << keyword(d.kind) << " (" << d.var.name << ") ";
    scope_.push_back(d.var);
    formula(d.body);
    scope_.pop_back();
    out_ << ')';
  }

  void term_node(const Term::VarNode& v) {
    std::optional<Sort> bound;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name == v.var.name) {
        bound = it->sort;
        break;
      }
    }
    Sort inferred = bound.value_or(number_sort(lang_));
    if (inferred == v.var.sort) {
      out_ << v.var.name;
    } else {
      out_ << "(var " << v.var.name << ' ' << to_string(v.var.sort) << ')';
    }
  }

  void term_node(const Term::Numeral& n) { out_ << n.value; }
  void term_node(const Term::RealConst& c) { out_ << "(rconst " << c.name << ')'; }

  void term_node(const Term::Binary& b) {
    out_ << '(' << (b.op == TermOp::Add ? "+" : b.op == TermOp::Mul ? "*" : "pair") << ' ';
    term(b.lhs);
    out_ << ' ';
    term(b.rhs);
    out_ << ')';
  }

  void term_node(const Term::Succ& s) {
    out_ << "(succ ";
    term(s.arg);
    out_ << ')';
  }

  void species(const SpeciesRef& s) { out_ << '(' << (s.is_var() ? "svar " : "sconst ") << s.index << ')'; }

  Language lang_;
  PrintOptions opts_;
  std::vector<Var> scope_;
  std::ostringstream out_;
};

bool term_is_real(const Term& t) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::VarNode>) return n.var.sort == Sort::Real;
        else if constexpr (std::is_same_v<T, Term::RealConst>) return true;
        else if constexpr (std::is_same_v<T, Term::Binary>) return term_is_real(n.lhs) || term_is_real(n.rhs);
        else if constexpr (std::is_same_v<T, Term::Succ>) return term_is_real(n.arg);
        else return false;
      },
      t.node());
}

bool mentions_real(const Formula& f) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Atom>) return term_is_real(n.lhs) || term_is_real(n.rhs);
        else if constexpr (std::is_same_v<T, Formula::In>) return term_is_real(n.element);
        else if constexpr (std::is_same_v<T, Formula::Binary>) return mentions_real(n.lhs) || mentions_real(n.rhs);
        else if constexpr (std::is_same_v<T, Formula::Quant>) return n.var.sort == Sort::Real || mentions_real(n.body);
        else if constexpr (std::is_same_v<T, Formula::Defined>) return true;
        else return false;
      },
      f.node());
}

}  // namespace

Formula parse(std::string_view text, Language lang) {
  Formula f = Parser(text, lang).formula_only();
  check_language(f, lang);
  return f;
}

Term parse_term(std::string_view text, Language lang) { return Parser(text, lang).term_only(); }

Language infer_language(const Formula& f) { return mentions_real(f) ? Language::Target : Language::Source; }

std::string print(const Formula& f, PrintOptions opts) {
  Printer p(infer_language(f), opts);
  p.formula(f);
  return p.str();
}

std::string print(const Term& t) {
  Printer p(term_is_real(t) ? Language::Target : Language::Source, {});
  p.term(t);
  return p.str();
}

void check_language(const Formula& f, Language lang) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Atom>) {
          if (lang == Language::Source) {
            if (n.kind == AtomKind::Apart) throw SortError("apartness is not part of the source language", print(f));
            if (term_is_real(n.lhs) || term_is_real(n.rhs))
              throw SortError("real-sorted term in a source formula", print(f));
          }
        } else if constexpr (std::is_same_v<T, Formula::In> || std::is_same_v<T, Formula::SpeciesEq>) {
          if (lang == Language::Target) throw SortError("species atom in a target formula", print(f));
        } else if constexpr (std::is_same_v<T, Formula::Binary>) {
          check_language(n.lhs, lang);
          check_language(n.rhs, lang);
        } else if constexpr (std::is_same_v<T, Formula::Quant>) {
          if (lang == Language::Source && n.var.sort == Sort::Real)
            throw SortError("real binder in a source formula", n.var.name);
          if (lang == Language::Target && n.var.sort == Sort::Species)
            throw SortError("species binder in a target formula", n.var.name);
          check_language(n.body, lang);
        } else if constexpr (std::is_same_v<T, Formula::Defined>) {
          if (lang == Language::Source) throw SortError("defined quantifier in a source formula", n.var.name);
          check_language(n.body, lang);
        }
      },
      f.node());
}

Formula unfold_apart(const Formula& f) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Formula::Atom>) {
          if (n.kind != AtomKind::Apart) return f;
          return Formula::disj(Formula::lt(n.lhs, n.rhs), Formula::lt(n.rhs, n.lhs));
        } else if constexpr (std::is_same_v<T, Formula::Binary>) {
          Formula l = unfold_apart(n.lhs), r = unfold_apart(n.rhs);
          switch (n.op) {
            case Connective::And: return Formula::conj(l, r);
            case Connective::Or: return Formula::disj(l, r);
            case Connective::Implies: return Formula::implies(l, r);
          }
          return f;
        } else if constexpr (std::is_same_v<T, Formula::Quant>) {
          return Formula::quant(n.q, n.var, unfold_apart(n.body));
        } else if constexpr (std::is_same_v<T, Formula::Defined>) {
          return Formula::defined(n.kind, n.var, unfold_apart(n.body));
        } else {
          return f;
        }
      },
      f.node());
}

}  // namespace hasr
