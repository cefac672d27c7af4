#include <gtest/gtest.h>

#include "cdkp/pdo.hpp"
#include "cdkp/verify.hpp"

using namespace cdkp;

namespace {

RationalFn sample_fn(double z, double c) { return RationalFn(ExpSum(make_exp(z, c)) + ExpSum::constant(1.5)); }

}  // namespace

TEST(PDOperator, ShiftRuleForDifference) {
  // Delta o f = Delta(f) + Lambda(f) Delta.
  const RationalFn f = sample_fn(0.3, 0.1);
  const PDOperator lhs = compose(PDOperator::power(1), PDOperator::multiplication(f));
  EXPECT_LT(max_relative_error(operator_grid(), lhs.coeff(0), delta(f)), 1e-13);
  EXPECT_LT(max_relative_error(operator_grid(), lhs.coeff(1), shift(f, 1)), 1e-13);
  EXPECT_TRUE(lhs.exact());
}

TEST(PDOperator, InverseComposesToIdentity) {
  const PDOperator p = compose(PDOperator::power(1), PDOperator::power(-1));
  EXPECT_EQ(p.coeffs().size(), 1u);
  EXPECT_NEAR(p.coeff(0)(0, make_times(0)), 1.0, 1e-15);
}

TEST(PDOperator, ConjugationByFunctionIsTruncatedNotExact) {
  const RationalFn f = sample_fn(0.4, 0.0);
  const PDOperator a = compose(PDOperator::power(-1), PDOperator::multiplication(f), 5);
  EXPECT_FALSE(a.exact());
  EXPECT_EQ(a.top(), -1);
  EXPECT_GE(a.valid_from(), -5);
}

TEST(PDOperator, AdjointSwitchesBasisAndIsInvolutive) {
  const RationalFn f = sample_fn(0.2, 0.3);
  const PDOperator a = PDOperator::monomial(f, 2) + PDOperator::multiplication(sample_fn(-0.3, 0.0));
  const PDOperator s = adjoint(a);
  EXPECT_EQ(s.basis(), Basis::Adjoint);
  const PDOperator back = adjoint(s);
  EXPECT_EQ(back.basis(), Basis::Forward);
  EXPECT_LT(coefficient_residual(back, a, operator_grid()), 1e-12);
}

TEST(PDOperator, MixedBasesAreRejected) {
  EXPECT_THROW(PDOperator::power(1) + PDOperator::power(1, Basis::Adjoint), DomainError);
}

TEST(PDOperator, ProjectionsSplitOperator) {
  const PDOperator a = PDOperator::power(2) + integral_term(sample_fn(0.3, 0.0), sample_fn(-0.2, 0.0), 4);
  const PDOperator p = project_plus(a), m = project_minus(a);
  EXPECT_EQ(p.bottom(), 2);
  EXPECT_EQ(p.top(), 2);
  EXPECT_EQ(m.top(), -1);
  EXPECT_LT(coefficient_residual(p + m, a, operator_grid()), 1e-14);
}

TEST(PDOperator, ApplyNegativeOrderOnAtom) {
  const RationalFn e(make_exp(0.5));
  const RationalFn out = apply(PDOperator::power(-1), e);
  const Times t = make_times(0.3);
  EXPECT_NEAR(out(1, t), e(1, t) / 0.5, 1e-14);
}

TEST(PDOperator, FreeLaxOperatorFlowsVanish) {
  // L = Delta with no pairs: B_1 = Delta commutes with L.
  ConstrainedLax lc;
  const LaxResiduals res = lax_pair_residuals(lc, 1, 4);
  for (const auto& [j, sides] : res.lax) {
    EXPECT_TRUE(sides.first.is_zero());
    EXPECT_TRUE(sides.second.is_zero());
  }
}
