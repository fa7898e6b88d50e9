#include "hasr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hasr/bounded_eval.hpp"
#include "hasr/kernels.hpp"
#include "hasr/kripke.hpp"
#include "hasr/selftest.hpp"
#include "hasr/species.hpp"
#include "hasr/syntax.hpp"
#include "hasr/translator.hpp"

namespace hasr::cli {

// ---------------------------------------------------------------------------
// Digests and manifests

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::string_view data) {
  std::ostringstream s;
  s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(data);
  return s.str();
}

void RunManifest::write(std::ostream& out) const {
  out << "tool=hasr\n";
  out << "version=" << version << '\n';
  out << "subcommand=" << subcommand << '\n';
  for (std::size_t i = 0; i < args.size(); ++i) out << "arg." << i << '=' << args[i] << '\n';
  for (const auto& [name, d] : inputs) out << "input." << name << '=' << d << '\n';
  for (const auto& [name, d] : outputs) out << "output." << name << '=' << d << '\n';
  if (!seeds.empty()) out << "seeds=" << seeds << '\n';
}

RunManifest RunManifest::read(std::istream& in) {
  RunManifest m;
  m.version.clear();
  bool tool = false;
  std::string line;
  std::size_t next_arg = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("manifest line without '=': " + line);
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "tool") {
      if (value != "hasr") throw std::runtime_error("manifest is for tool '" + value + "'");
      tool = true;
    } else if (key == "version") {
      m.version = value;
    } else if (key == "subcommand") {
      m.subcommand = value;
    } else if (key.rfind("arg.", 0) == 0) {
      if (key != "arg." + std::to_string(next_arg)) throw std::runtime_error("manifest arguments out of order");
      ++next_arg;
      m.args.push_back(value);
    } else if (key.rfind("input.", 0) == 0) {
      m.inputs.emplace_back(key.substr(6), value);
    } else if (key.rfind("output.", 0) == 0) {
      m.outputs.emplace_back(key.substr(7), value);
    } else if (key == "seeds") {
      m.seeds = value;
    } else {
      throw std::runtime_error("unknown manifest key '" + key + "'");
    }
  }
  if (!tool || m.subcommand.empty()) throw std::runtime_error("not a hasr manifest");
  return m;
}

// ---------------------------------------------------------------------------
// Invocation plumbing

namespace {

struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs are read and outputs buffered here; nothing touches the file system
// for writing until the subcommand has succeeded.
struct Context {
  explicit Context(std::istream& source) : in(source) {}

  std::istream& in;
  bool replaying = false;
  std::vector<std::pair<std::string, std::string>> inputs;   // name, digest
  std::vector<std::pair<std::string, std::string>> outputs;  // name, content
  std::string seeds;
  std::string manifest_path;
  std::string subcommand;
  std::vector<std::string> recorded_args;
  std::string replay_request;  // set by the replay subcommand

  std::string read(const std::string& path) {
    std::string content;
    if (path.empty() || path == "-") {
      if (replaying) throw std::runtime_error("cannot replay a run that read standard input");
      std::ostringstream s;
      s << in.rdbuf();
      content = s.str();
    } else {
      std::ifstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open " + path);
      std::ostringstream s;
      s << f.rdbuf();
      content = s.str();
    }
    inputs.emplace_back(path.empty() ? "-" : path, digest_hex(content));
    return content;
  }

  void emit(const std::string& path, std::string content) {
    outputs.emplace_back(path.empty() ? "-" : path, std::move(content));
  }

  RunManifest manifest() const {
    RunManifest m;
    m.subcommand = subcommand;
    m.args = recorded_args;
    m.inputs = inputs;
    for (const auto& [name, content] : outputs) m.outputs.emplace_back(name, digest_hex(content));
    m.seeds = seeds;
    return m;
  }
};

Orientation parse_orientation(const std::string& s) {
  return s == "normalized" ? Orientation::QuotientNormalized : Orientation::AsWritten;
}

template <class F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageFailure(e.what());
  }
}

// ---------------------------------------------------------------------------
// Subcommands

struct TranslateArgs {
  std::string mode = "macro", orientation = "as-written", in = "-", out = "-";
  bool emit_psi = false, emit_phiN = false;
};

void do_translate(Context& ctx, const TranslateArgs& a) {
  std::ostringstream out;
  if (a.emit_psi || a.emit_phiN) {
    auto r = [](const char* n) { return Var{n, Sort::Real}; };
    if (a.emit_phiN) out << print(phi_N(r("x"), r("y"), r("u"), r("v"))) << '\n';
    if (a.emit_psi) out << print(psi(r("x"))) << '\n';
  } else {
    Formula f = parse(ctx.read(a.in), Language::Source);
    TranslationConfig cfg{a.mode == "full" ? Expansion::Full : Expansion::Macro, parse_orientation(a.orientation)};
    out << print(tau(f, VarMap::build(f), cfg)) << '\n';
  }
  ctx.emit(a.out, out.str());
}

struct SimulateArgs {
  natural horizon = 50;
  std::uint64_t seed = 0;
  std::size_t seeds = 0;
  std::string alpha = "total", schedule = "never", out = "-", summary;
  bool rks = false;
};

void do_simulate(Context& ctx, const SimulateArgs& a) {
  ChoiceSeq alpha = as_usage([&] { return ChoiceSeq::parse(a.alpha); });
  Schedule sched = as_usage([&] { return Schedule::parse(a.schedule); });
  if (a.rks) alpha = ChoiceSeq::total();

  if (a.seeds == 0) {
    ctx.seeds = std::to_string(a.seed);
    SimRun r = a.rks ? rks_mode(sched, a.horizon, a.seed) : run(alpha, sched, a.horizon, a.seed);
    ConjunctReport rep = check_conjuncts(r);
    std::ostringstream trace;
    write_trace(trace, r, rep);
    ctx.emit(a.out, trace.str());
    if (!a.summary.empty()) {
      std::ostringstream sum;
      write_summary(sum, r, rep);
      ctx.emit(a.summary, sum.str());
    }
    return;
  }

  std::vector<std::uint64_t> seeds(a.seeds);
  for (std::size_t i = 0; i < a.seeds; ++i) seeds[i] = a.seed + i;
  ctx.seeds = std::to_string(a.seed) + ".." + std::to_string(a.seed + a.seeds - 1);
  std::vector<SimRun> runs = simulate_ensemble(alpha, sched, a.horizon, seeds);

  std::ostringstream out;
  std::size_t stabilized = 0;
  std::array<std::array<std::size_t, 4>, 5> tally{};
  std::ostringstream lines;
  for (const auto& r : runs) {
    ConjunctReport rep = check_conjuncts(r);
    if (r.stabilized) ++stabilized;
    lines << "seed=" << r.config.seed << " stabilized=";
    if (r.stabilized) lines << r.stabilized->moment << '/' << r.stabilized->value;
    else lines << "none";
    for (std::size_t c = 0; c < 5; ++c) {
      lines << " C" << (c + 1) << '=' << to_string(rep[c].status);
      ++tally[c][static_cast<std::size_t>(rep[c].status)];
    }
    lines << '\n';
  }
  out << "# hasr-ensemble 1\n";
  out << "alpha=" << alpha.to_spec() << "\nschedule=" << sched.to_spec() << "\nhorizon=" << a.horizon << '\n';
  out << "seeds=" << ctx.seeds << "\nruns=" << runs.size() << "\nstabilized=" << stabilized << '\n';
  const ConjunctStatus order[] = {ConjunctStatus::Holds, ConjunctStatus::Vacuous, ConjunctStatus::Violated,
                                  ConjunctStatus::UndeterminedAtHorizon};
  for (std::size_t c = 0; c < 5; ++c)
    for (auto st : order)
      out << 'C' << (c + 1) << '.' << to_string(st) << '=' << tally[c][static_cast<std::size_t>(st)] << '\n';
  out << lines.str();
  ctx.emit(a.out, out.str());
}

struct EncodeArgs {
  std::string from_run = "-", out = "-";
  std::size_t precision = 24;
};

void do_encode(Context& ctx, const EncodeArgs& a) {
  std::istringstream trace(ctx.read(a.from_run));
  SimRun r = read_trace(trace);
  EncodedSpecies enc = encode(r);
  Precision prec = encoding_precision(enc, a.precision);

  std::ostringstream out;
  out << "# hasr-encoding 1\n";
  out << "alpha=" << r.config.alpha.to_spec() << "\nschedule=" << r.config.schedule.to_spec()
      << "\nhorizon=" << r.config.horizon << "\nseed=" << r.config.seed << '\n';
  if (r.stabilized) {
    natural m = r.stabilized->moment, k = r.stabilized->value;
    out << "m=" << m << "\nk=" << k << '\n';
    out << "u=" << enc.u.closed_form()->get_str() << " # u(n)=0 for n<" << m << ", floor(2^n/" << m << ") after\n";
    out << "v=" << enc.v.closed_form()->get_str() << " # v(n)=0 for n<" << m << ", floor(2^n/" << m * k
        << ") after\n";
  } else {
    out << "m=none\nk=none\nu=0\nv=0\n";
  }
  Precision rcheck{20, prec.horizon};
  auto check = [&](const RealGen& g) { return check_R(g, rcheck).proven ? "pass" : "fail"; };
  out << "check_R.u=" << check(enc.u) << "\ncheck_R.v=" << check(enc.v) << '\n';
  out << "precision=" << prec.k << "\nsearch_horizon=" << prec.horizon << '\n';
  out << "# n quotient\n";
  for (natural n = 1; n <= 20; ++n) out << n << ' ' << to_string(quotient_status(enc, n, prec)) << '\n';
  ctx.emit(a.out, out.str());
}

struct EvalArgs {
  std::string structure, formula = "-", sentinel = "false", language = "auto", out = "-";
};

void do_eval(Context& ctx, const EvalArgs& a) {
  std::istringstream st(ctx.read(a.structure));
  StructureSpec spec = parse_structure(st);
  std::string text = ctx.read(a.formula);
  Formula f = [&] {
    if (a.language == "source") return parse(text, Language::Source);
    if (a.language == "target") return parse(text, Language::Target);
    // A formula is read as a target formula if the source reading fails.
    try {
      return parse(text, Language::Source);
    } catch (const std::exception&) {
      return parse(text, Language::Target);
    }
  }();
  FiniteStructure s =
      FiniteStructure::build(spec, a.sentinel == "true" ? SentinelMode::PhiTrue : SentinelMode::PhiFalse);
  ctx.emit(a.out, eval(f, s) ? "true\n" : "false\n");
}

void do_selftest(Context& ctx, bool& all_passed) {
  auto checks = run_selftest();
  std::ostringstream out;
  print_selftest(out, checks);
  all_passed = std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.passed; });
  ctx.emit("-", out.str());
}

// Parses and runs one subcommand without committing outputs. Returns the
// exit code; outputs and digests are left in ctx.
int execute(const std::vector<std::string>& argv, Context& ctx, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpreting second-order Heyting arithmetic in intuitionistic real algebra", "hasr"};
  app.set_version_flag("--version", "hasr " + std::string(tool_version));
  app.require_subcommand(1);

  std::string manifest;
  auto add_manifest = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifest, "Write a run manifest to this path");
  };

  TranslateArgs ta;
  auto* translate = app.add_subcommand("translate", "Translate a source formula into the ordered-ring language");
  translate->add_option("--mode", ta.mode, "macro keeps defined quantifiers, full expands them")
      ->check(CLI::IsMember({"macro", "full"}));
  translate->add_option("--orientation", ta.orientation, "Membership clause orientation")
      ->check(CLI::IsMember({"as-written", "normalized"}));
  translate->add_option("--in", ta.in, "Input formula file (- for stdin)");
  translate->add_option("--out", ta.out, "Output file (- for stdout)");
  translate->add_flag("--emit-psi", ta.emit_psi, "Print psi(x) instead of translating");
  translate->add_flag("--emit-phiN", ta.emit_phiN, "Print phi_N(x,y,u,v) instead of translating");
  add_manifest(translate);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run the staged construction of beta");
  simulate->add_option("--horizon", sa.horizon, "Last moment simulated")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed, "Seed (first seed of an ensemble)");
  simulate->add_option("--seeds", sa.seeds, "Run an ensemble of N consecutive seeds")->check(CLI::PositiveNumber);
  auto* alpha_opt =
      simulate->add_option("--alpha", sa.alpha, "total | empty | witnesses:P/K,... | bits:PREFIX[~PERIOD]");
  simulate->add_option("--schedule", sa.schedule, "phi@T | notphi@T | never");
  simulate->add_flag("--rks", sa.rks, "Use the total choice sequence")->excludes(alpha_opt);
  simulate->add_option("--out", sa.out, "Trace (or ensemble summary) output, - for stdout");
  simulate->add_option("--summary", sa.summary, "Also write a key=value run summary here");
  add_manifest(simulate);

  EncodeArgs ea;
  auto* encode_cmd = app.add_subcommand("encode", "Encode a simulated species as a pair of real generators");
  encode_cmd->add_option("--from-run", ea.from_run, "Trace file (- for stdin)");
  encode_cmd->add_option("--precision", ea.precision, "Agreement 2^-K for the quotient table");
  encode_cmd->add_option("--out", ea.out, "Output file (- for stdout)");
  add_manifest(encode_cmd);

  EvalArgs va;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a formula classically over a finite structure");
  eval_cmd->add_option("--structure", va.structure, "Structure file")->required();
  eval_cmd->add_option("--formula", va.formula, "Formula file (- for stdin)");
  eval_cmd->add_option("--sentinel", va.sentinel, "Truth value forced on the sentinel atoms")
      ->check(CLI::IsMember({"true", "false"}));
  eval_cmd->add_option("--language", va.language, "source, target or auto")
      ->check(CLI::IsMember({"auto", "source", "target"}));
  eval_cmd->add_option("--out", va.out, "Output file (- for stdout)");
  add_manifest(eval_cmd);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
  add_manifest(selftest);

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare digests");
  replay->add_option("manifest", replay_path, "Manifest file")->required();

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Success : UsageError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  ctx.subcommand = chosen->get_name();
  for (std::size_t i = 2; i < argv.size(); ++i) {
    if (argv[i] == "--manifest") {
      ++i;
      continue;
    }
    if (argv[i].rfind("--manifest=", 0) == 0) continue;
    ctx.recorded_args.push_back(argv[i]);
  }
  ctx.manifest_path = manifest;

  try {
    if (chosen == translate) {
      do_translate(ctx, ta);
      if (manifest.empty() && ta.out != "-" && !ta.out.empty()) ctx.manifest_path = ta.out + ".manifest";
    } else if (chosen == simulate) {
      do_simulate(ctx, sa);
      if (manifest.empty() && sa.out != "-" && !sa.out.empty()) ctx.manifest_path = sa.out + ".manifest";
    } else if (chosen == encode_cmd) {
      do_encode(ctx, ea);
      if (manifest.empty() && ea.out != "-" && !ea.out.empty()) ctx.manifest_path = ea.out + ".manifest";
    } else if (chosen == eval_cmd) {
      do_eval(ctx, va);
      if (manifest.empty() && va.out != "-" && !va.out.empty()) ctx.manifest_path = va.out + ".manifest";
    } else if (chosen == selftest) {
      bool ok = false;
      do_selftest(ctx, ok);
      if (!ok) return DomainError;
    } else if (chosen == replay) {
      if (ctx.replaying) throw UsageFailure("a manifest cannot replay another replay");
      ctx.replay_request = replay_path;
    }
  } catch (const UsageFailure& e) {
    err << "hasr: usage error: " << e.what() << '\n';
    return UsageError;
  } catch (const std::exception& e) {
    err << "hasr: error: " << e.what() << '\n';
    return DomainError;
  }
  return Success;
}

int do_replay(const std::string& path, std::istream& in, std::ostream& out, std::ostream& err) {
  RunManifest recorded;
  try {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    recorded = RunManifest::read(f);
  } catch (const std::exception& e) {
    err << "hasr: error: " << e.what() << '\n';
    return DomainError;
  }
  if (recorded.subcommand == "replay") {
    err << "hasr: usage error: a manifest cannot replay another replay\n";
    return UsageError;
  }
  std::vector<std::string> argv{"hasr", recorded.subcommand};
  argv.insert(argv.end(), recorded.args.begin(), recorded.args.end());
  Context ctx{in};
  ctx.replaying = true;
  std::ostringstream sink_out, sink_err;
  int code = execute(argv, ctx, sink_out, sink_err);
  if (code != Success) {
    err << sink_err.str() << "hasr: replay failed with exit code " << code << '\n';
    return DomainError;
  }
  RunManifest now = ctx.manifest();
  bool ok = true;
  if (recorded.version != std::string(tool_version)) {
    err << "replay: manifest from version " << recorded.version << ", running " << tool_version << '\n';
    ok = false;
  }
  if (now.inputs != recorded.inputs) {
    err << "replay: input digests differ\n";
    ok = false;
  }
  if (now.outputs != recorded.outputs) {
    err << "replay: output digests differ\n";
    for (const auto& [name, d] : now.outputs) err << "  now      output." << name << '=' << d << '\n';
    for (const auto& [name, d] : recorded.outputs) err << "  recorded output." << name << '=' << d << '\n';
    ok = false;
  }
  if (!ok) return DomainError;
  out << "replay ok: " << recorded.subcommand << ", " << now.outputs.size() << " output(s) identical\n";
  return Success;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err) {
  Context ctx{in};
  int code = execute(argv, ctx, out, err);
  if (code != Success && ctx.outputs.empty()) return code;
  if (!ctx.replay_request.empty()) return do_replay(ctx.replay_request, in, out, err);

  try {
    for (const auto& [name, content] : ctx.outputs) {
      if (name == "-") {
        out << content;
        continue;
      }
      std::ofstream f(name, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + name);
      f << content;
    }
    out.flush();
    if (!ctx.manifest_path.empty()) {
      std::ofstream f(ctx.manifest_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + ctx.manifest_path);
      ctx.manifest().write(f);
    }
  } catch (const std::exception& e) {
    err << "hasr: error: " << e.what() << '\n';
    return DomainError;
  }
  return code;
}

}  // namespace hasr::cli
