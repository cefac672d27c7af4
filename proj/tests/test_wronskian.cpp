#include <gtest/gtest.h>

#include "cdkp/linalg.hpp"
#include "cdkp/solutions.hpp"
#include "cdkp/wronskian.hpp"

using namespace cdkp;

TEST(Linalg, DeterminantAndVandermonde) {
  Matrix m(3);
  const double zs[3] = {0.2, -0.5, 0.9};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = std::pow(zs[j], static_cast<double>(i));
  EXPECT_NEAR(determinant(m), vandermonde({0.2, -0.5, 0.9}), 1e-14);
  EXPECT_DOUBLE_EQ(binomial(5, 2), 10.0);
  EXPECT_DOUBLE_EQ(binomial(-1, 3), -1.0);
}

TEST(Wronskian, OfExponentialsIsVandermondeProduct) {
  const std::vector<ExpSum> fs{ExpSum(make_exp(0.3)), ExpSum(make_exp(-0.2)), ExpSum(make_exp(0.6))};
  const ExpSum w = wronskian_fn(WronskianSpec{fs});
  const Times t = make_times(0.4, 0.1);
  const double expected = vandermonde({0.3, -0.2, 0.6}) * fs[0](1, t) * fs[1](1, t) * fs[2](1, t);
  EXPECT_NEAR(w(1, t), expected, 1e-14 * std::abs(expected));
  EXPECT_NEAR(wronskian_value(WronskianSpec{fs}, 1, t), expected, 1e-13 * std::abs(expected));
}

TEST(Wronskian, SymbolicMatchesNumericDeterminant) {
  const ExpSum f1 = ExpSum(make_exp(0.3)) + ExpSum(make_exp(-0.4, 0.2));
  const ExpSum f2 = ExpSum(make_exp(0.1, -0.3)) + ExpSum(make_exp(0.7));
  const WronskianSpec s{{f1, f2, delta(f1)}};
  const Times t = make_times(-0.5, 0.3);
  EXPECT_NEAR(wronskian_fn(s)(0, t), wronskian_value(s, 0, t), 1e-12);
}

TEST(Wronskian, NestedQuotientTimesWmEqualsFlat) {
  const std::vector<ExpSum> fs{ExpSum(make_exp(0.3)) + ExpSum(make_exp(-0.45)),
                               ExpSum(make_exp(0.15)) + ExpSum(make_exp(0.6, 0.3))};
  const Times t = make_times(0.3, -0.1);
  for (int n = -1; n <= 2; ++n) {
    const DetEval flat = criterion_flat_eval(fs, 1, {0, 1}, n, t);
    const DetEval nested = criterion_nested_eval(fs, 1, {0, 1}, n, t);
    EXPECT_NEAR(nested.value, flat.value, 1e-8 * std::max(flat.scale, nested.scale)) << "n=" << n;
  }
}

TEST(Wronskian, ReductionVanishesOnlyAtRoot) {
  SeedParams s{0.5, 0.1, -0.4, 0.1, 0.2, -0.1, 0.3, -0.1};
  EXPECT_LT(criterion_flat({seed_f1(s), seed_f2(s)}, 2, 1), kWronskianZero);
  s.z = 0.3;
  EXPECT_GT(criterion_flat({seed_f1(s), seed_f2(s)}, 2, 1), 1e-6);
}

TEST(Wronskian, IndexSubsets) {
  const auto subs = index_subsets(4, 2);
  EXPECT_EQ(subs.size(), 6u);
  EXPECT_EQ(subs.front(), (std::vector<std::size_t>{0, 1}));
}
