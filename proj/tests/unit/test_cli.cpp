#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "json_lines.hpp"
#include "run_config.hpp"

using namespace quasivar::cli;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = QUASIVAR_CONFIG_DIR;

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / ("quasivar_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(dir);
  return dir;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = temp_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "quasivar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

Result run_fixed(const std::string& command, RunConfig cfg) {
  Invocation inv;
  inv.command = command;
  inv.config = std::move(cfg);
  inv.quiet = true;
  inv.timestamp = "2000-01-01T00:00:00Z";
  std::ostringstream out, err;
  const int code = run_command(inv, out, err);
  return {code, out.str()};
}

RunConfig cfg_b() { return load_run_config(kConfigDir + "/cfg_b.conf"); }

bool has_line(const std::string& out, const std::string& needle) {
  return out.find(needle) != std::string::npos;
}

}  // namespace

TEST(RunConfigParse, ReadsKeysAndComments) {
  std::istringstream in("# comment\nN = 3\np1 = 1.5 # trailing\n\nseeds = 3, 5,7\nexj01_literal = true\n");
  const RunConfig c = parse_run_config(in);
  EXPECT_EQ(c.exponents.N, 3);
  EXPECT_EQ(c.exponents.p1, 1.5);
  EXPECT_TRUE(c.exponents.exj01_literal);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 5, 7}));
}

TEST(RunConfigParse, RejectsMalformedInput) {
  for (const char* text : {"p3 = 2\n", "p1 = 2\np1 = 3\n", "p1 =\n", "p1 = abc\n", "just text\n", "n = 1.5\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_run_config(in), ConfigError) << text;
  }
}

TEST(RunConfigParse, HashIsStableAndSensitive) {
  const RunConfig a = cfg_b();
  RunConfig b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.exponents.q1 = 4.000000000000001;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(JsonLines, NumbersRoundTrip) {
  EXPECT_EQ(json_number(0.1), "0.10000000000000001");
  EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), "\"inf\"");
  EXPECT_EQ(json_string("a\"b\n"), "\"a\\\"b\\n\"");
  const std::string s = JsonRecord("x").add("k", 2).add("b", true).str();
  EXPECT_EQ(s, "{\"record\":\"x\",\"k\":2,\"b\":true}");
}

TEST(Cli, CheckExitCodes) {
  const Result ok = run({"check", "--config", kConfigDir + "/cfg_a.conf"});
  EXPECT_EQ(ok.code, kExitOk);
  EXPECT_TRUE(has_line(ok.out, "\"admissible\":true"));

  std::string text = read_file(kConfigDir + "/cfg_a.conf");
  text += "\n";
  const fs::path bad = write_temp("gamma5.conf", [&] {
    std::string t = text;
    t.replace(t.find("gamma1 = 4"), 10, "gamma1 = 5");
    t.replace(t.find("gamma2 = 4"), 10, "gamma2 = 5");
    return t;
  }());
  const Result fail = run({"check", "--config", bad.string()});
  EXPECT_EQ(fail.code, kExitFailure);
  EXPECT_TRUE(has_line(fail.out, "exj02"));

  const fs::path unknown = write_temp("unknown.conf", text + "p3 = 2\n");
  const Result usage = run({"check", "--config", unknown.string()});
  EXPECT_EQ(usage.code, kExitUsage);
  EXPECT_TRUE(has_line(usage.out, "ConfigError"));

  EXPECT_EQ(run({"nonsense", "--config", bad.string()}).code, kExitUsage);
  EXPECT_EQ(run({"check"}).code, kExitUsage);
}

TEST(Cli, OutputIsReproducible) {
  const Result a = run_fixed("derive", load_run_config(kConfigDir + "/cfg_a.conf"));
  const Result b = run_fixed("derive", load_run_config(kConfigDir + "/cfg_a.conf"));
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(has_line(a.out, "\"timestamp\":\"2000-01-01T00:00:00Z\""));
}

TEST(Cli, GradcheckPasses) {
  RunConfig c = load_run_config(kConfigDir + "/cfg_a.conf");
  c.n = 17;
  c.gradcheck_samples = 3;
  const Result r = run_fixed("gradcheck", c);
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_TRUE(has_line(r.out, "\"record\":\"gradcheck\""));
}

TEST(Cli, EigenReportsPiSquared) {
  RunConfig c = cfg_b();
  c.n = 1025;
  const Result r = run_fixed("eigen", c);
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(has_line(r.out, "\"lambda1\":9.86"));
}

TEST(Cli, SolveAndDump) {
  RunConfig c = cfg_b();
  c.n = 129;
  c.out = (temp_dir() / "solve").string();
  const Result r = run_fixed("solve", c);
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_TRUE(has_line(r.out, "\"record\":\"verification\""));
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "candidate_u.txt"));
  const Result d = run_fixed("dump", c);
  EXPECT_EQ(d.code, kExitOk);
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "phi1.txt"));
  c.out.clear();
  EXPECT_EQ(run_fixed("dump", c).code, kExitUsage);
}

TEST(Cli, MultiFindsCandidates) {
  RunConfig c = cfg_b();
  c.n = 129;
  c.count = 2;
  const Result r = run_fixed("multi", c);
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_TRUE(has_line(r.out, "\"record\":\"multiplicity\""));
}

TEST(Cli, StructuralGateRejectsInadmissibleConfig) {
  RunConfig c = cfg_b();
  c.exponents.theta1 = c.exponents.theta2 = 0.2;
  c.n = 17;
  const Result r = run_fixed("solve", c);
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_TRUE(has_line(r.out, "\"record\":\"error\""));
}
