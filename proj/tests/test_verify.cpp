#include <gtest/gtest.h>

#include "cdkp/verify.hpp"

using namespace cdkp;

namespace {

VerifyOptions small(std::set<std::string> suites) {
  VerifyOptions opt;
  opt.sweep.zs = {0.5};
  opt.sweep.ks = {1, 2};
  opt.sweep.cs = {0.3};
  opt.sweep.t3s = {0.1};
  opt.suites = std::move(suites);
  return opt;
}

}  // namespace

TEST(Verify, ConventionNamesRoundTrip) {
  for (ConventionId c : all_conventions()) EXPECT_EQ(parse_convention(convention_name(c)), c);
  EXPECT_FALSE(parse_convention("bogus").has_value());
}

TEST(Verify, EmptySweepGivesEmptyReport) {
  VerifyOptions opt;
  opt.sweep.zs.clear();
  const auto rep = run_all(opt);
  EXPECT_TRUE(rep.checks.empty());
  EXPECT_EQ(rep.exit_code(), 0);
}

TEST(Verify, SuiteSelectionLimitsChecks) {
  const auto rep = run_all(small({"triangle"}));
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_EQ(rep.checks[0].name.rfind("C1", 0), 0u);
  EXPECT_EQ(rep.checks[0].status, Status::Pass);
  EXPECT_TRUE(rep.al_convention.empty());
}

TEST(Verify, AlRecordsAConvention) {
  const auto rep = run_all(small({"al"}));
  EXPECT_FALSE(rep.al_convention.empty());
  const CheckEntry* c6 = rep.find("C6");
  ASSERT_NE(c6, nullptr);
  EXPECT_NE(c6->status, Status::Fail);
}

TEST(Verify, PinnedConventionThatMissesFails) {
  auto opt = small({"al"});
  opt.convention = ConventionId::AS_PRINTED;
  const auto rep = run_all(opt);
  const CheckEntry* c6 = rep.find("C6");
  ASSERT_NE(c6, nullptr);
  EXPECT_EQ(c6->status, Status::Fail);
  EXPECT_EQ(rep.exit_code(), 1);
}

TEST(Verify, FailingCriterionSetsExitCode) {
  ConformanceReport rep;
  rep.checks.push_back({"C9.synthetic", "", "", 1.0, Status::Fail, ""});
  EXPECT_EQ(rep.exit_code(), 1);
  rep.checks[0].status = Status::Indeterminate;
  EXPECT_EQ(rep.exit_code(), 0);
}

TEST(Verify, RelativeErrorIsScaleAware) {
  EXPECT_DOUBLE_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_error(1.0, 1.1), 0.1 / 1.1, 1e-15);
}
