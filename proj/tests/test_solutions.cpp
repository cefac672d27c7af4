#include <gtest/gtest.h>

#include "cdkp/solutions.hpp"
#include "cdkp/verify.hpp"

using namespace cdkp;

TEST(Solutions, SpecializedParametersAreValidated) {
  EXPECT_THROW(SolitonParams::specialized(0.0, 0.0, 1), DomainError);
  EXPECT_THROW(SolitonParams::specialized(1.0, 0.0, 1), DomainError);
  EXPECT_THROW(SolitonParams::specialized(0.5, 0.0, 0), DomainError);
  EXPECT_THROW(SolitonParams::general(0.2, 0.2, -0.3, 0, 0, 0, 1), DomainError);
}

TEST(Solutions, TauIsTheTwoByTwoWronskian) {
  const auto p = SolitonParams::specialized(0.5, 0.7, 2);
  const SeedParams s = p.seeds();
  EXPECT_TRUE(nearly_same(tau_cdkp(p), wronskian_fn(WronskianSpec{{seed_f1(s), seed_f2(s)}}), 1e-12));
  EXPECT_TRUE(nearly_same(tau_cdkp(p), tau_delta2(s), 1e-12));
}

TEST(Solutions, W4FactorizationHoldsOffTheRoot) {
  SeedParams s{0.5, 0.1, -0.4, 0.25, 0.2, -0.1, 0.3, 0.05};
  const Times t = make_times(0.3, -0.2);
  for (int k = 1; k <= 3; ++k) {
    const DetEval w = w4_flat(s, k, 1, t);
    EXPECT_NEAR(w.value, w4_factorized(s, k, 1, t), 1e-9 * w.scale) << "k=" << k;
  }
}

TEST(Solutions, PipelineMatchesClosedForms) {
  for (int k = 1; k <= 3; ++k) {
    const auto p = SolitonParams::specialized(0.4, 0.3, k, 0.2);
    const SolutionSet s = build_via_pipeline(p);
    const Grid g = acceptance_grid(0.2);
    EXPECT_LT(max_relative_error(g, s.q1, q1_closed(p)), 1e-10);
    EXPECT_LT(max_relative_error(g, s.r1, r1_closed(p)), 1e-10);
    EXPECT_LT(max_relative_error(g, s.u1, u1_closed(p)), 1e-10);
  }
}

TEST(Solutions, PrintedQ1OnlyAgreesOnYZero) {
  const auto p = SolitonParams::specialized(0.5, 0.0, 1);
  const Grid flat{{0, 1}, {-1.0, 0.0, 1.0}, {0.0}, 0.0};
  const Grid off{{0, 1}, {-1.0, 0.0, 1.0}, {1.0}, 0.0};
  EXPECT_LT(max_relative_error(flat, q1_printed(p), q1_closed(p)), 1e-12);
  EXPECT_GT(max_relative_error(off, q1_printed(p), q1_closed(p)), 1e-3);
}

TEST(Solutions, ChoiceZ1LeavesOneChannel) {
  const auto p = SolitonParams::general(0.5, 0.1, -0.4, 0.2, -0.1, 0.3, 1, Choice::ZEqZ1);
  const SolutionSet s = build_via_pipeline(p);
  EXPECT_EQ(s.surviving_channel, 2);
}

TEST(Solutions, DeltaU1IsDifferenceFromSiteZero) {
  const auto p = SolitonParams::specialized(0.5, 0.0, 1);
  const RationalFn u = u1_closed(p);
  const Times t = make_times(0.4, 0.1);
  EXPECT_DOUBLE_EQ(delta_u1(u, 2, t), u(2, t) - u(0, t));
}
