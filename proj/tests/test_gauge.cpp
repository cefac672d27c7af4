#include <gtest/gtest.h>

#include "cdkp/gauge.hpp"
#include "cdkp/verify.hpp"

using namespace cdkp;

namespace {

std::vector<ExpSum> two_seeds() {
  return {ExpSum(make_exp(0.3)) + ExpSum(make_exp(-0.4, 0.2)), ExpSum(make_exp(0.1)) + ExpSum(make_exp(0.6, -0.3))};
}

}  // namespace

TEST(Gauge, ChainMatchesWronskianQuotient) {
  const auto seeds = two_seeds();
  const ExpSum g = ExpSum(make_exp(-0.25)) + ExpSum(make_exp(0.45, 0.1));
  const GaugeChannel ch(seeds);
  EXPECT_LT(max_relative_error(acceptance_grid(), chain_apply(seeds, g), transform_eigen(ch, g)), 1e-12);
}

TEST(Gauge, GeneratorsAreAnnihilated) {
  const auto seeds = two_seeds();
  const GaugeChannel ch(seeds);
  for (const auto& f : seeds) EXPECT_TRUE(transform_eigen(ch, f).is_zero());
}

TEST(Gauge, OperatorFormAgreesWithTransform) {
  const auto seeds = two_seeds();
  const GaugeChannel ch(seeds);
  const ExpSum g{make_exp(0.35, 0.2)};
  const RationalFn via_op = apply(as_operator(ch), RationalFn(g));
  EXPECT_LT(max_relative_error(acceptance_grid(), via_op, transform_eigen(ch, g)), 1e-12);
}

TEST(Gauge, InverseComposesToIdentity) {
  const GaugeChannel ch(two_seeds());
  const PDOperator prod = compose(inverse_operator(ch, 6), as_operator(ch), 6);
  EXPECT_LT(coefficient_residual_abs(prod, PDOperator::identity(), operator_grid()), 1e-10);
}

TEST(Gauge, DegenerateChannelsAreRejected) {
  const ExpSum f = ExpSum(make_exp(0.3)) + ExpSum(make_exp(-0.2));
  EXPECT_THROW(GaugeChannel({f, 2.0 * f}), DegenerateError);
  EXPECT_THROW(GaugeChannel({f, f, f, f}), SizeError);
  EXPECT_THROW(GaugeChannel(std::vector<ExpSum>{}), DomainError);
}

TEST(Gauge, AdjointIndexIsChecked) {
  const GaugeChannel ch(two_seeds());
  EXPECT_THROW(transform_adjoint(ch, 0), DomainError);
  EXPECT_THROW(transform_adjoint(ch, 3), DomainError);
}
