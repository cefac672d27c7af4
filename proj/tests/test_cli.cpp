#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace cdkp;
using namespace cdkp::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_args(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cdkp_test_" + name);
}

}  // namespace

TEST(Cli, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Cli, RangeParsing) {
  const Range r = parse_range("-1:2:0.5");
  EXPECT_EQ(r.lo, -1.0);
  EXPECT_EQ(r.hi, 2.0);
  EXPECT_EQ(r.step, 0.5);
  EXPECT_EQ(parse_range(format_range(r)), r);
}

TEST(Cli, EvalWritesRowMajorCsv) {
  const auto r = run_args({"eval", "--field", "u1", "--x-range", "0:1:0.5", "--y-range", "-1:0:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "x,y,value");
  EXPECT_EQ(lines[1].substr(0, 5), "0,-1,");
  EXPECT_EQ(lines[2].substr(0, 7), "0.5,-1,");
  EXPECT_EQ(lines[4].substr(0, 4), "0,0,");
}

TEST(Cli, EvalIsDeterministic) {
  const std::vector<std::string> args{"eval", "--field", "q1", "--k", "2", "--x-range", "-3:3:1", "--y-range", "-2:2:1"};
  EXPECT_EQ(run_args(args).out, run_args(args).out);
}

TEST(Cli, PolesBecomeNanWithLogNote) {
  // With z = (0.5, -0.5, 0.2) and c2 = c3 = 0, tau(0; 0) = 0.7 - 1.3 e^{c1}, so c1 = log(7/13) puts a
  // zero of tau at the origin.
  const std::string c1 = format_double(std::log(7.0 / 13.0));
  const auto r = run_args({"eval", "--field", "q1", "--z1", "0.5", "--z2", "-0.5", "--z3", "0.2", "--c1", c1,
                           "--n", "0", "--x-range", "-1:1:1", "--y-range", "0:0:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n0,0,nan\n"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("-1,0,nan"), std::string::npos);
  EXPECT_NE(r.err.find("pole"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_args({"eval", "--z", "1.5"}).code, kExitUsage);
  EXPECT_EQ(run_args({"eval", "--field", "nope"}).code, kExitUsage);
  EXPECT_EQ(run_args({"eval", "--x-range", "1:0:1"}).code, kExitUsage);
  EXPECT_EQ(run_args({"eval", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run_args({"verify", "--suite", "nosuch"}).code, kExitUsage);
  EXPECT_EQ(run_args({"verify", "--convention", "NOPE"}).code, kExitUsage);
  EXPECT_EQ(run_args({}).code, kExitUsage);
}

TEST(Cli, DumpConfigRoundTrips) {
  const auto first = run_args({"eval", "--z", "0.3", "--k", "2", "--x-range", "-5:5:0.25", "--dump-config"});
  ASSERT_EQ(first.code, 0);
  const auto path = temp_path("cfg.json");
  std::ofstream(path) << first.out;
  const auto second = run_args({"--config", path.string(), "--dump-config"});
  EXPECT_EQ(second.code, 0);
  EXPECT_EQ(first.out, second.out);
  std::filesystem::remove(path);
}

TEST(Cli, FlagsOverrideConfig) {
  const auto path = temp_path("override.json");
  std::ofstream(path) << R"({"command":"eval","z":0.3,"k":3})";
  const auto r = run_args({"--config", path.string(), "--k", "1", "--dump-config"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["z"], 0.3);
  EXPECT_EQ(j["command"], "eval");
  std::filesystem::remove(path);
}

TEST(Cli, BadConfigExitsTwo) {
  const auto path = temp_path("bad.json");
  std::ofstream(path) << R"({"zz":1})";
  EXPECT_EQ(run_args({"--config", path.string(), "eval"}).code, kExitUsage);
  std::ofstream(path) << "{not json";
  EXPECT_EQ(run_args({"--config", path.string(), "eval"}).code, kExitUsage);
  std::filesystem::remove(path);
  EXPECT_EQ(run_args({"--config", path.string(), "eval"}).code, kExitUsage);
}

TEST(Cli, VerifyReportShape) {
  const auto path = temp_path("report.json");
  const auto r = run_args({"verify", "--suite", "triangle,derivative", "--out", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  ASSERT_EQ(j["checks"].size(), 2u);
  for (const auto& c : j["checks"]) {
    for (const char* key : {"name", "convention", "grid", "max_residual", "status", "notes"})
      EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_EQ(c["status"], "PASS");
  }
  EXPECT_TRUE(j["al_convention"].is_null());
  std::filesystem::remove(path);
}

TEST(Cli, PinnedConventionFailureExitsOne) {
  EXPECT_EQ(run_args({"verify", "--suite", "al", "--convention", "FORMAL_ADJOINT"}).code, kExitCheckFailed);
}

TEST(Cli, FiguresWriteCsvAndScripts) {
  const auto dir = temp_path("figs");
  std::filesystem::remove_all(dir);
  const auto r =
      run_args({"figures", "--outdir", dir.string(), "--x-range", "-2:2:1", "--y-range", "-2:2:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t csv = 0, gp = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") ++csv;
    if (e.path().extension() == ".gp") ++gp;
  }
  EXPECT_EQ(csv, 15u);
  EXPECT_EQ(gp, 30u);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ReduceReportsFactorization) {
  const auto r = run_args({"reduce", "--z", "0.5", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("(vanishes)"), std::string::npos);
  EXPECT_NE(r.out.find("equals W2(f1, f2): yes"), std::string::npos);
}
