#include "hasr/kripke.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hasr {

// ---------------------------------------------------------------------------
// ChoiceSeq

namespace {

void check_bits(const std::vector<std::uint8_t>& v) {
  for (auto b : v)
    if (b > 1) throw std::invalid_argument("choice sequence values must be 0 or 1");
}

std::vector<std::uint8_t> minimal_period(std::vector<std::uint8_t> period) {
  const std::size_t n = period.size();
  for (std::size_t len = 1; len < n; ++len) {
    if (n % len != 0) continue;
    bool repeats = true;
    for (std::size_t i = len; i < n && repeats; ++i) repeats = period[i] == period[i - len];
    if (repeats) {
      period.resize(len);
      break;
    }
  }
  return period;
}

std::string bit_string(const std::vector<std::uint8_t>& v) {
  std::string s;
  for (auto b : v) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad bit '" + std::string(1, c) + "' in alpha spec");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

natural parse_natural(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument(std::string("expected a natural for ") + what + ", got '" + s + "'");
  return std::stoull(s);
}

}  // namespace

ChoiceSeq::ChoiceSeq(std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> period) {
  if (period.empty()) throw std::invalid_argument("choice sequence period must be non-empty");
  check_bits(prefix);
  check_bits(period);
  period = minimal_period(std::move(period));
  // Fold prefix entries that already agree with the periodic continuation.
  while (!prefix.empty() && prefix.back() == period.back()) {
    prefix.pop_back();
    std::rotate(period.rbegin(), period.rbegin() + 1, period.rend());
  }
  prefix_ = std::move(prefix);
  period_ = minimal_period(std::move(period));
}

ChoiceSeq ChoiceSeq::total() { return ChoiceSeq({}, {1}); }
ChoiceSeq ChoiceSeq::empty() { return ChoiceSeq({}, {0}); }

ChoiceSeq ChoiceSeq::witnesses(const std::vector<std::pair<natural, natural>>& pk) {
  std::vector<std::uint8_t> prefix;
  for (auto [p, k] : pk) {
    natural i = pair(p, k);
    if (i > 1'000'000) throw std::invalid_argument("witness index too large for an explicit prefix");
    if (prefix.size() <= i) prefix.resize(i + 1, 0);
    prefix[i] = 1;
  }
  return ChoiceSeq(std::move(prefix), {0});
}

ChoiceSeq ChoiceSeq::periodic(std::vector<std::uint8_t> prefix, std::vector<std::uint8_t> period) {
  return ChoiceSeq(std::move(prefix), std::move(period));
}

ChoiceSeq ChoiceSeq::parse(const std::string& spec) {
  if (spec == "total") return total();
  if (spec == "empty") return empty();
  if (spec.rfind("witnesses:", 0) == 0) {
    std::vector<std::pair<natural, natural>> pk;
    std::stringstream ss(spec.substr(10));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto slash = item.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("witness must be P/K, got '" + item + "'");
      pk.emplace_back(parse_natural(item.substr(0, slash), "witness p"),
                      parse_natural(item.substr(slash + 1), "witness k"));
    }
    return witnesses(pk);
  }
  if (spec.rfind("bits:", 0) == 0) {
    std::string body = spec.substr(5);
    auto tilde = body.find('~');
    auto prefix = parse_bits(body.substr(0, tilde));
    std::vector<std::uint8_t> period{0};
    if (tilde != std::string::npos) {
      period = parse_bits(body.substr(tilde + 1));
      if (period.empty()) throw std::invalid_argument("empty period in alpha spec");
    }
    return periodic(std::move(prefix), std::move(period));
  }
  throw std::invalid_argument("unknown alpha spec '" + spec + "'");
}

std::string ChoiceSeq::to_spec() const {
  if (prefix_.empty() && period_ == std::vector<std::uint8_t>{1}) return "total";
  if (prefix_.empty() && period_ == std::vector<std::uint8_t>{0}) return "empty";
  return "bits:" + bit_string(prefix_) + "~" + bit_string(period_);
}

std::uint8_t ChoiceSeq::at(natural i) const {
  if (i < prefix_.size()) return prefix_[i];
  return period_[(i - prefix_.size()) % period_.size()];
}

bool ChoiceSeq::witnessed(natural k, natural bound) const {
  for (natural p = 0; p <= bound; ++p)
    if (at(pair(p, k))) return true;
  return false;
}

// pair(p + 2L, k) - pair(p, k) and pair(p, k + 2L) - pair(p, k) are multiples
// of L, so past the prefix membership is periodic in both coordinates with
// period 2L. That bounds every search below.

bool ChoiceSeq::contains(natural k) const {
  const natural limit = prefix_.size() + 2 * period_.size();
  for (natural p = 0; p < limit; ++p)
    if (at(pair(p, k))) return true;
  return false;
}

bool ChoiceSeq::is_total() const {
  const natural limit = prefix_.size() + 2 * period_.size();
  for (natural k = 1; k < limit + 1; ++k)
    if (!contains(k)) return false;
  return true;
}

std::optional<natural> ChoiceSeq::member_above(natural bound) const {
  const natural last = std::max<natural>(bound + 1, prefix_.size()) + 2 * period_.size();
  for (natural k = bound + 1; k <= last; ++k)
    if (contains(k)) return k;
  return std::nullopt;
}

std::vector<natural> ChoiceSeq::members_upto(natural bound) const {
  std::vector<natural> out;
  for (natural k = 1; k <= bound; ++k)
    if (contains(k)) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Schedule

Schedule Schedule::parse(const std::string& spec) {
  if (spec == "never") return never();
  auto at = spec.find('@');
  if (at != std::string::npos) {
    std::string head = spec.substr(0, at);
    natural t = parse_natural(spec.substr(at + 1), "schedule moment");
    if (head == "phi") return phi_at(t);
    if (head == "notphi") return not_phi_at(t);
  }
  throw std::invalid_argument("unknown schedule spec '" + spec + "' (phi@T, notphi@T or never)");
}

std::string Schedule::to_spec() const {
  switch (kind) {
    case Kind::PhiProvedAt: return "phi@" + std::to_string(moment);
    case Kind::NotPhiProvedAt: return "notphi@" + std::to_string(moment);
    case Kind::NeverWithinHorizon: return "never";
  }
  return "never";
}

// ---------------------------------------------------------------------------
// Simulation

DrawSource::DrawSource(std::uint64_t seed) : engine_(seed) {}

natural DrawSource::draw(natural n) {
  if (n == 0) throw std::invalid_argument("draw: empty range");
  const std::uint64_t limit = (std::numeric_limits<std::uint64_t>::max() / n) * n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return 1 + r % n;
}

SimRun run(const ChoiceSeq& alpha, const Schedule& sched, natural horizon, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("run: horizon must be at least 1");
  if (sched.kind != Schedule::Kind::NeverWithinHorizon && sched.moment > horizon)
    throw std::invalid_argument("run: schedule moment " + std::to_string(sched.moment) + " exceeds horizon " +
                                std::to_string(horizon));

  SimRun out;
  out.config = RunConfig{horizon, seed, alpha, sched};
  out.beta.assign(horizon + 1, 0);
  DrawSource source(seed);
  const bool proves_phi = sched.kind == Schedule::Kind::PhiProvedAt;

  for (natural n = 0; n <= horizon; ++n) {
    if (out.stabilized) {
      out.beta[n] = out.stabilized->value;
      continue;
    }
    // A refutation of phi, or no proof yet, keeps beta at 0.
    if (!proves_phi || n < sched.moment || n == 0) continue;
    natural k = source.draw(n);
    bool hit = alpha.witnessed(k, n);
    out.draws.push_back(Draw{n, k, hit});
    if (hit) {
      out.beta[n] = k;
      out.stabilized = Stabilization{n, k};
    }
  }
  return out;
}

SimRun rks_mode(const Schedule& sched, natural horizon, std::uint64_t seed) {
  return run(ChoiceSeq::total(), sched, horizon, seed);
}

// ---------------------------------------------------------------------------
// Conjunct checking
//
// Decided-run semantics: the schedule is the whole truth about phi. "phi"
// reads as "phi gets proved", "not phi" as "not phi gets proved", and
// "phi or not phi" as "one of them gets proved". A finite run fixes only a
// prefix, so each conjunct is evaluated classically in every completion the
// construction allows past the horizon and the results are combined.

std::string_view to_string(ConjunctStatus s) {
  switch (s) {
    case ConjunctStatus::Holds: return "holds";
    case ConjunctStatus::Vacuous: return "vacuous";
    case ConjunctStatus::Violated: return "violated";
    case ConjunctStatus::UndeterminedAtHorizon: return "undetermined-at-horizon";
  }
  return "?";
}

bool ConjunctReport::any_violated() const {
  return std::any_of(conjuncts.begin(), conjuncts.end(),
                     [](const ConjunctResult& c) { return c.status == ConjunctStatus::Violated; });
}

namespace {

enum class Decision { Phi, NotPhi, Undecided };

struct Completion {
  Decision decision;
  std::optional<natural> fires_with;  // eventual value of beta, if it ever fires
};

std::vector<Completion> completions(const SimRun& r) {
  const auto& alpha = r.config.alpha;
  const natural H = r.config.horizon;
  std::vector<Completion> out;

  std::optional<natural> fired;
  for (natural b : r.beta)
    if (b > 0) {
      fired = b;
      break;
    }

  auto future_fires = [&](std::vector<Completion>& into) {
    for (natural k : alpha.members_upto(H)) into.push_back({Decision::Phi, k});
    if (auto k = alpha.member_above(H)) into.push_back({Decision::Phi, *k});
    // With alpha total the first draw after the proof is accepted.
    if (!alpha.is_total()) into.push_back({Decision::Phi, std::nullopt});
  };

  switch (r.config.schedule.kind) {
    case Schedule::Kind::PhiProvedAt:
      if (fired) out.push_back({Decision::Phi, fired});
      else future_fires(out);
      break;
    case Schedule::Kind::NotPhiProvedAt:
      out.push_back({Decision::NotPhi, fired});
      break;
    case Schedule::Kind::NeverWithinHorizon:
      if (fired) {
        out.push_back({Decision::Undecided, fired});
      } else {
        out.push_back({Decision::Undecided, std::nullopt});
        out.push_back({Decision::NotPhi, std::nullopt});
        future_fires(out);
      }
      break;
  }
  return out;
}

struct Truth {
  bool antecedent;
  bool value;
};

// The single place fixing how the schema's abbreviations are read:
//   "beta(n) = k for some n"     -> fires_with == k
//   "phi or not phi"             -> decision != Undecided
//   "alpha(<m,k>) = 1 for some m" -> alpha.contains(k)
enum class Which { C2, C3, C4 };

Truth evaluate(Which which, const Completion& c, const ChoiceSeq& alpha, natural k) {
  const bool decided = c.decision != Decision::Undecided;
  const bool fired = c.fires_with.has_value();
  const bool fired_k = c.fires_with == k;
  switch (which) {
    case Which::C2: {
      bool ante = alpha.is_total() && !fired;
      return {ante, !ante || c.decision == Decision::NotPhi};
    }
    case Which::C3: {
      bool ante = fired_k || decided;  // (not fired_k) -> decided
      return {ante, !ante || alpha.contains(k) || decided};
    }
    case Which::C4: {
      bool ante = alpha.contains(k);
      return {ante, !ante || fired_k || decided};
    }
  }
  return {false, true};
}

ConjunctStatus combine_completions(Which which, const std::vector<Completion>& cs, const ChoiceSeq& alpha, natural k) {
  bool any_ante = false, all_true = true, all_false = true;
  for (const auto& c : cs) {
    Truth t = evaluate(which, c, alpha, k);
    any_ante = any_ante || t.antecedent;
    all_true = all_true && t.value;
    all_false = all_false && !t.value;
  }
  if (!any_ante) return ConjunctStatus::Vacuous;
  if (all_true) return ConjunctStatus::Holds;
  if (all_false) return ConjunctStatus::Violated;
  return ConjunctStatus::UndeterminedAtHorizon;
}

ConjunctResult pointwise(Which which, const std::vector<Completion>& cs, const ChoiceSeq& alpha, natural H) {
  std::size_t holds = 0, vacuous = 0;
  std::optional<natural> undetermined, violated;
  for (natural k = 1; k <= H; ++k) {
    switch (combine_completions(which, cs, alpha, k)) {
      case ConjunctStatus::Holds: ++holds; break;
      case ConjunctStatus::Vacuous: ++vacuous; break;
      case ConjunctStatus::Violated:
        if (!violated) violated = k;
        break;
      case ConjunctStatus::UndeterminedAtHorizon:
        if (!undetermined) undetermined = k;
        break;
    }
  }
  std::string range = "k<=" + std::to_string(H);
  if (violated) return {ConjunctStatus::Violated, "fails at k=" + std::to_string(*violated)};
  if (undetermined) return {ConjunctStatus::UndeterminedAtHorizon, "open from k=" + std::to_string(*undetermined)};
  if (holds == 0) return {ConjunctStatus::Vacuous, range};
  return {ConjunctStatus::Holds, range + ", " + std::to_string(vacuous) + " vacuous"};
}

}  // namespace

ConjunctReport check_conjuncts(const SimRun& r) {
  ConjunctReport rep;
  const auto& sched = r.config.schedule;
  const natural H = r.config.horizon;

  // C1: beta(n) > 0 only once phi has been proved.
  rep.conjuncts[0] = {ConjunctStatus::Holds, "beta positive only after a proof of phi"};
  for (natural n = 0; n < r.beta.size(); ++n) {
    if (r.beta[n] == 0) continue;
    if (sched.kind != Schedule::Kind::PhiProvedAt || sched.moment > n) {
      rep.conjuncts[0] = {ConjunctStatus::Violated, "beta(" + std::to_string(n) + ")>0 without a proof of phi"};
      break;
    }
  }

  auto cs = completions(r);
  ConjunctStatus c2 = combine_completions(Which::C2, cs, r.config.alpha, 0);
  rep.conjuncts[1] = {c2, r.config.alpha.is_total() ? "alpha total" : "alpha not total"};
  rep.conjuncts[2] = pointwise(Which::C3, cs, r.config.alpha, H);
  rep.conjuncts[3] = pointwise(Which::C4, cs, r.config.alpha, H);

  // C5: once beta(n) = k > 0 it stays k.
  rep.conjuncts[4] = {ConjunctStatus::Holds, "beta constant after first positive value"};
  std::optional<natural> first;
  for (natural n = 0; n < r.beta.size(); ++n) {
    if (!first) {
      if (r.beta[n] > 0) first = r.beta[n];
    } else if (r.beta[n] != *first) {
      rep.conjuncts[4] = {ConjunctStatus::Violated, "beta changes at n=" + std::to_string(n)};
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Trace and summary files

void write_trace(std::ostream& out, const SimRun& r, const ConjunctReport& report) {
  out << "# hasr-trace 1\n";
  out << "# alpha " << r.config.alpha.to_spec() << '\n';
  out << "# schedule " << r.config.schedule.to_spec() << '\n';
  out << "# horizon " << r.config.horizon << '\n';
  out << "# seed " << r.config.seed << '\n';
  out << "# columns n beta drawn witnessed\n";
  std::size_t d = 0;
  for (natural n = 0; n < r.beta.size(); ++n) {
    out << n << ' ' << r.beta[n];
    if (d < r.draws.size() && r.draws[d].moment == n) {
      out << ' ' << r.draws[d].value << ' ' << (r.draws[d].witnessed ? "yes" : "no");
      ++d;
    } else {
      out << " - -";
    }
    out << '\n';
  }
  if (r.stabilized) out << "# stabilized " << r.stabilized->moment << ' ' << r.stabilized->value << '\n';
  else out << "# stabilized none\n";
  for (std::size_t i = 0; i < report.conjuncts.size(); ++i) {
    out << "# C" << (i + 1) << ' ' << to_string(report.conjuncts[i].status);
    if (!report.conjuncts[i].detail.empty()) out << " (" << report.conjuncts[i].detail << ')';
    out << '\n';
  }
}

SimRun read_trace(std::istream& in) {
  SimRun r;
  std::optional<ChoiceSeq> alpha;
  std::optional<Schedule> sched;
  std::optional<natural> horizon;
  std::optional<std::uint64_t> seed;
  bool saw_magic = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key >> value;
      if (key == "hasr-trace") saw_magic = true;
      else if (key == "alpha") alpha = ChoiceSeq::parse(value);
      else if (key == "schedule") sched = Schedule::parse(value);
      else if (key == "horizon") horizon = parse_natural(value, "horizon");
      else if (key == "seed") seed = parse_natural(value, "seed");
      continue;
    }
    std::string n_s, beta_s, drawn_s, wit_s;
    if (!(ls >> n_s >> beta_s >> drawn_s >> wit_s)) fail("expected 4 columns");
    natural n = parse_natural(n_s, "moment");
    if (n != r.beta.size()) fail("moments must be consecutive from 0");
    r.beta.push_back(parse_natural(beta_s, "beta"));
    if (drawn_s != "-") {
      if (wit_s != "yes" && wit_s != "no") fail("witnessed column must be yes, no or -");
      r.draws.push_back(Draw{n, parse_natural(drawn_s, "drawn k"), wit_s == "yes"});
    }
  }
  if (!saw_magic) throw std::runtime_error("not a hasr trace (missing '# hasr-trace' header)");
  if (!alpha || !sched || !horizon || !seed) throw std::runtime_error("trace header is incomplete");
  if (r.beta.size() != *horizon + 1) throw std::runtime_error("trace has the wrong number of moments");
  r.config = RunConfig{*horizon, *seed, *alpha, *sched};
  for (natural n = 0; n < r.beta.size(); ++n) {
    if (r.beta[n] > 0) {
      r.stabilized = Stabilization{n, r.beta[n]};
      break;
    }
  }
  return r;
}

void write_summary(std::ostream& out, const SimRun& r, const ConjunctReport& report) {
  out << "alpha=" << r.config.alpha.to_spec() << '\n';
  out << "schedule=" << r.config.schedule.to_spec() << '\n';
  out << "horizon=" << r.config.horizon << '\n';
  out << "seed=" << r.config.seed << '\n';
  out << "draws=" << r.draws.size() << '\n';
  if (r.stabilized) {
    out << "stabilized_moment=" << r.stabilized->moment << '\n';
    out << "stabilized_value=" << r.stabilized->value << '\n';
  } else {
    out << "stabilized_moment=none\nstabilized_value=none\n";
  }
  for (std::size_t i = 0; i < report.conjuncts.size(); ++i)
    out << 'C' << (i + 1) << '=' << to_string(report.conjuncts[i].status) << '\n';
}

}  // namespace hasr
