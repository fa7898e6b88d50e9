#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hasr/cli.hpp"

namespace fs = std::filesystem;
using hasr::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result hasr_cmd(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "hasr");
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = run(args, in, out, err);
  return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hasr-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name), std::ios::binary) << content;
  }
  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

}  // namespace

TEST(Cli, VersionHelpAndUsage) {
  Result v = hasr_cmd({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
  EXPECT_EQ(hasr_cmd({"--help"}).code, 0);
  EXPECT_EQ(hasr_cmd({}).code, 2);
  EXPECT_EQ(hasr_cmd({"frobnicate"}).code, 2);
  EXPECT_EQ(hasr_cmd({"simulate", "--horizon", "0"}).code, 2);
  EXPECT_EQ(hasr_cmd({"simulate", "--alpha", "nonsense"}).code, 2);
  EXPECT_EQ(hasr_cmd({"simulate", "--schedule", "phi@x"}).code, 2);
  EXPECT_EQ(hasr_cmd({"simulate", "--rks", "--alpha", "total"}).code, 2);
  EXPECT_EQ(hasr_cmd({"eval"}).code, 2);
  EXPECT_EQ(hasr_cmd({"translate", "--mode", "sideways"}).code, 2);
}

TEST(Cli, TranslateBottomFromStdin) {
  Result r = hasr_cmd({"translate"}, "(bot)\n");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "(or (= y 0) (apart y 0))\n");
}

TEST(Cli, TranslateErrorsAreDomainErrors) {
  Result r = hasr_cmd({"translate"}, "(and (bot)");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("syntax error"), std::string::npos);
  EXPECT_EQ(hasr_cmd({"translate"}, "(apart 0 1)").code, 1);
}

TEST(Cli, TranslateModesAndFixedFormulas) {
  Result norm = hasr_cmd({"translate", "--orientation", "normalized"}, "(in n (svar 1))");
  EXPECT_EQ(norm.out, "(imp (not (= (* n v1) u1)) (or (= y 0) (apart y 0)))\n");
  Result full = hasr_cmd({"translate", "--mode", "full"}, "(exists (n Nat) (= n 0))");
  EXPECT_EQ(full.code, 0);
  EXPECT_EQ(full.out.find("existsN"), std::string::npos);
  EXPECT_NE(full.out.find("(forall (y_1 Real)"), std::string::npos);
  Result psi = hasr_cmd({"translate", "--emit-psi"});
  EXPECT_EQ(psi.out.rfind("(forall (y Real) (exists (u Real) (exists (v Real) (and (not (< x 1))", 0), 0u);
  Result phi = hasr_cmd({"translate", "--emit-phiN"});
  EXPECT_EQ(phi.out.rfind("(and (not (< x 1))", 0), 0u);
}

TEST(Cli, SimulateNeverGivesZeroTrace) {
  Result r = hasr_cmd({"simulate", "--schedule", "never", "--horizon", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int n, beta;
    ls >> n >> beta;
    EXPECT_EQ(n, rows);
    EXPECT_EQ(beta, 0);
    ++rows;
  }
  EXPECT_EQ(rows, 51);
  EXPECT_NE(r.out.find("# stabilized none"), std::string::npos);
  EXPECT_EQ(r.out.find("violated"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministic) {
  std::vector<std::string> args{"simulate", "--alpha", "witnesses:1/2", "--schedule", "phi@2", "--seed", "4"};
  EXPECT_EQ(hasr_cmd(args).out, hasr_cmd(args).out);
}

TEST(Cli, Ensemble) {
  Result r = hasr_cmd({"simulate", "--rks", "--schedule", "phi@3", "--seeds", "20", "--horizon", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# hasr-ensemble 1\n", 0), 0u);
  EXPECT_NE(r.out.find("\nruns=20\n"), std::string::npos);
  EXPECT_NE(r.out.find("\nstabilized=20\n"), std::string::npos);
  EXPECT_NE(r.out.find("\nC5.holds=20\n"), std::string::npos);
  EXPECT_NE(r.out.find("\nC1.violated=0\n"), std::string::npos);
  EXPECT_NE(r.out.find("seed=19 stabilized=3/"), std::string::npos);
}

TEST_F(CliFiles, SimulateThenEncode) {
  Result sim = hasr_cmd({"simulate", "--alpha", "witnesses:0/2", "--schedule", "phi@2", "--seed", "1", "--horizon",
                         "120", "--out", path("run.trace"), "--summary", path("run.summary")});
  ASSERT_EQ(sim.code, 0) << sim.err;
  EXPECT_TRUE(sim.out.empty());
  EXPECT_TRUE(fs::exists(path("run.trace.manifest")));
  EXPECT_NE(slurp("run.summary").find("stabilized_value=2\n"), std::string::npos);

  Result enc = hasr_cmd({"encode", "--from-run", path("run.trace")});
  ASSERT_EQ(enc.code, 0) << enc.err;
  EXPECT_EQ(enc.out.rfind("# hasr-encoding 1\n", 0), 0u);
  EXPECT_NE(enc.out.find("\nk=2\n"), std::string::npos);
  EXPECT_NE(enc.out.find("\ncheck_R.u=pass\ncheck_R.v=pass\n"), std::string::npos);
  EXPECT_NE(enc.out.find("\n2 confirmed\n"), std::string::npos);
  for (int n : {1, 3, 4, 20}) EXPECT_NE(enc.out.find("\n" + std::to_string(n) + " excluded\n"), std::string::npos);

  write("broken.trace", "# hasr-trace 1\n0 0 - -\n");
  EXPECT_EQ(hasr_cmd({"encode", "--from-run", path("broken.trace")}).code, 1);
  EXPECT_EQ(hasr_cmd({"encode", "--from-run", path("absent.trace")}).code, 1);
}

TEST_F(CliFiles, EvalOverStructure) {
  write("s.txt", "nat 0 1 2 3\nspecies 0 1 2\n");
  write("member.txt", "(in 2 (sconst 0))");
  write("target.txt", "(existsN (x) (= x 2))");
  Result r = hasr_cmd({"eval", "--structure", path("s.txt"), "--formula", path("member.txt")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "true\n");
  EXPECT_EQ(hasr_cmd({"eval", "--structure", path("s.txt"), "--formula", path("target.txt")}).out, "true\n");
  EXPECT_EQ(hasr_cmd({"eval", "--structure", path("s.txt")}, "(bot)").out, "false\n");
  EXPECT_EQ(hasr_cmd({"eval", "--structure", path("s.txt"), "--sentinel", "true"}, "(or (= y 0) (apart y 0))").out,
            "true\n");
  EXPECT_EQ(hasr_cmd({"eval", "--structure", path("s.txt"), "--language", "source"}, "(existsN (x) (= x 2))").code,
            1);
  EXPECT_EQ(hasr_cmd({"eval", "--structure", path("s.txt")}, "(= x 0)").code, 1);
  EXPECT_EQ(hasr_cmd({"eval", "--structure", path("s.txt"), "--sentinel", "maybe"}, "(bot)").code, 2);
}

TEST_F(CliFiles, TranslateFileAndReplay) {
  write("in.txt", "(forall (x Nat) (in x (svar 1)))\n");
  Result r = hasr_cmd({"translate", "--in", path("in.txt"), "--out", path("out.txt"), "--mode", "full"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string manifest = slurp("out.txt.manifest");
  EXPECT_NE(manifest.find("tool=hasr\n"), std::string::npos);
  EXPECT_NE(manifest.find("subcommand=translate\n"), std::string::npos);
  EXPECT_NE(manifest.find("input." + path("in.txt") + "=fnv1a64:"), std::string::npos);

  Result ok = hasr_cmd({"replay", path("out.txt.manifest")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("replay ok"), std::string::npos);

  write("in.txt", "(bot)\n");
  Result changed = hasr_cmd({"replay", path("out.txt.manifest")});
  EXPECT_EQ(changed.code, 1);
  EXPECT_NE(changed.err.find("input digests differ"), std::string::npos);
}

TEST_F(CliFiles, ExplicitManifestForStdout) {
  Result r = hasr_cmd({"simulate", "--rks", "--schedule", "phi@2", "--manifest", path("m.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_FALSE(r.out.empty());
  std::ifstream in(path("m.txt"));
  hasr::cli::RunManifest m = hasr::cli::RunManifest::read(in);
  EXPECT_EQ(m.subcommand, "simulate");
  EXPECT_EQ(m.seeds, "0");
  EXPECT_EQ(m.args, (std::vector<std::string>{"--rks", "--schedule", "phi@2"}));
  ASSERT_EQ(m.outputs.size(), 1u);
  EXPECT_EQ(m.outputs[0].second, hasr::cli::digest_hex(r.out));
  EXPECT_EQ(hasr_cmd({"replay", path("m.txt")}).code, 0);
}

TEST_F(CliFiles, ManifestRoundTrip) {
  hasr::cli::RunManifest m;
  m.subcommand = "encode";
  m.args = {"--from-run", "a b.trace"};
  m.inputs = {{"a b.trace", "fnv1a64:0000000000000001"}};
  m.outputs = {{"-", "fnv1a64:00000000000000ff"}};
  std::ostringstream out;
  m.write(out);
  std::istringstream in(out.str());
  EXPECT_EQ(hasr::cli::RunManifest::read(in), m);
  write("bad.manifest", "tool=other\nsubcommand=x\n");
  EXPECT_EQ(hasr_cmd({"replay", path("bad.manifest")}).code, 1);
}

TEST(Cli, Digest) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(hasr::cli::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hasr::cli::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hasr::cli::digest_hex("a"), "fnv1a64:af63dc4c8601ec8c");
}

TEST(Cli, SelftestIsByteStable) {
  Result a = hasr_cmd({"selftest"}), b = hasr_cmd({"selftest"});
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("9/9 checks passed"), std::string::npos);
}
