#include <gtest/gtest.h>

#include <cmath>

#include "cdkp/expsum.hpp"

using namespace cdkp;

TEST(ExpSum, MakeExpMatchesClosedForm) {
  const ExpSum e{make_exp(0.4, 0.3)};
  const Times t = make_times(0.7, -0.2, 0.1);
  const double expected = std::exp(0.3) * std::pow(1.4, 2.0) * std::exp(0.4 * 0.7 + 0.16 * -0.2 + 0.064 * 0.1);
  EXPECT_NEAR(e(2, t), expected, 1e-14 * expected);
}

TEST(ExpSum, LikeTermsMergeExactly) {
  const ExpSum a{make_exp(0.3)}, b{make_exp(-0.2)};
  EXPECT_EQ((a * b).size(), 1u);
  EXPECT_TRUE((a + b - a - b).is_zero());
  EXPECT_EQ(a * b, b * a);
}

TEST(ExpSum, DeltaActsAsEigenvalue) {
  const ExpSum e{make_exp(0.6, 0.1)};
  const Times t = make_times(0.2, 0.4);
  EXPECT_NEAR(delta(e)(1, t), 0.6 * e(1, t), 1e-14);
  EXPECT_NEAR(delta_star(e)(1, t), (1.0 / 1.6 - 1.0) * e(1, t), 1e-14);
  EXPECT_NEAR(delta_pow(e, 3)(0, t), std::pow(0.6, 3) * e(0, t), 1e-14);
}

TEST(ExpSum, TimeDerivativeMultipliesByRate) {
  const ExpSum e{make_exp(0.5)};
  const Times t = make_times(0.1, 0.2, 0.3);
  EXPECT_NEAR(ddt(e, 2)(0, t), 0.25 * e(0, t), 1e-14);
  EXPECT_THROW(ddt(e, 0), DomainError);
}

TEST(ExpSum, EvaluateReportsCancellationFreeScale) {
  const ExpSum a{make_exp(0.5)};
  const ExpSum d = a - ExpSum::constant(1.0);
  const auto ev = d.evaluate(0, make_times(0.0));
  EXPECT_EQ(ev.value, 0.0);
  EXPECT_DOUBLE_EQ(ev.scale, 1.0);
}

TEST(RationalFn, ArithmeticAgreesWithPointwise) {
  const ExpSum a = ExpSum(make_exp(0.3)) + ExpSum::constant(2.0);
  const ExpSum b = ExpSum(make_exp(-0.4, 0.2)) + ExpSum::constant(1.0);
  const RationalFn f(a, b), g(b, a);
  const Times t = make_times(0.5, -0.3);
  for (int n = -2; n <= 2; ++n) {
    EXPECT_NEAR((f + g)(n, t), f(n, t) + g(n, t), 1e-13);
    EXPECT_NEAR((f * g)(n, t), 1.0, 1e-13);
    EXPECT_NEAR((f / g)(n, t), f(n, t) / g(n, t), 1e-13);
    EXPECT_NEAR(shift(f, 1)(n, t), f(n + 1, t), 1e-13);
  }
}

TEST(RationalFn, QuotientRuleDerivative) {
  const ExpSum a = ExpSum(make_exp(0.3)) + ExpSum::constant(2.0);
  const ExpSum b = ExpSum(make_exp(-0.4)) + ExpSum::constant(1.0);
  const RationalFn f(a, b);
  const double h = 1e-6, x = 0.3;
  const double fd = (f(1, make_times(x + h)) - f(1, make_times(x - h))) / (2 * h);
  EXPECT_NEAR(ddt(f, 1)(1, make_times(x)), fd, 1e-8);
}

TEST(RationalFn, PoleIsReported) {
  const ExpSum den = ExpSum(make_exp(0.5)) - ExpSum::constant(1.0);
  const RationalFn f(ExpSum::constant(1.0), den);
  EXPECT_THROW(f(0, make_times(0.0)), PoleError);
  EXPECT_NO_THROW(f(1, make_times(0.0)));
}

TEST(RationalFn, RepeatedFactorsMerge) {
  const ExpSum a = ExpSum(make_exp(0.3)) + ExpSum::constant(2.0);
  const RationalFn f(ExpSum::constant(1.0), a);
  const RationalFn g = f * f * (1.0 / 3.0 * f);
  ASSERT_EQ(g.factors().size(), 1u);
  EXPECT_NEAR(g(3, make_times(1.0)), std::pow(f(3, make_times(1.0)), 3) / 3.0, 1e-15);
}
