#include <gtest/gtest.h>

#include "support.hpp"

using namespace mqthom;
using namespace mqthom::testing;

namespace {

FormMatrix random_skew_two_forms(std::size_t n, const Chart& c, std::uint64_t seed) {
  const FormMatrix theta = harness::random_skew_one_forms(n, c, seed, 1);
  const FormMatrix other = harness::random_skew_one_forms(n, c, seed, 2);
  FormMatrix omega(n, n, c);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      omega(i, j) = wedge(theta(i, j), other(i, j));
      omega(j, i) = -omega(i, j);
    }
  return omega;
}

}  // namespace

TEST(SplitSign, Examples) {
  EXPECT_EQ(split_sign({0, 1, 2}, {}), 1);
  EXPECT_EQ(split_sign({}, {0, 1}), 1);
  EXPECT_EQ(split_sign({1}, {0, 2}), -1);
  EXPECT_EQ(split_sign({0, 2}, {1}), -1);
  EXPECT_EQ(split_sign({2}, {0, 1}), 1);
}

TEST(SplitSign, InvalidSplits) {
  EXPECT_THROW(split_sign({0, 1}, {1}), InvalidSplit);
  EXPECT_THROW(split_sign({0}, {2}), InvalidSplit);
  EXPECT_THROW(split_sign({1, 0}, {}), InvalidSplit);
}

TEST(SplitSign, EvenSplitsEnumeration) {
  const auto splits = even_splits(3);
  ASSERT_EQ(splits.size(), 4u);
  EXPECT_TRUE(splits[0].rest.empty());
  for (const auto& s : splits) {
    EXPECT_EQ(s.rest.size() % 2, 0u);
    EXPECT_EQ(s.sign, split_sign(s.first, s.rest));
  }
}

TEST(Pfaffian, EmptyIndexSet) {
  const Chart c = base_chart(2, 2);
  const FormMatrix omega = random_skew_two_forms(3, c, 1);
  EXPECT_EQ(pfaffian_factor_perm(omega, {}), ChartForm::one(c));
  EXPECT_EQ(pfaffian_factor_recursive(omega, {}), ChartForm::one(c));
}

TEST(Pfaffian, PairGivesHalfEntry) {
  const Chart c(3, 0, 0, 2);
  const FormMatrix omega = random_skew_two_forms(3, c, 4);
  ASSERT_FALSE(omega(0, 2).is_zero());
  EXPECT_EQ(pfaffian_factor_perm(omega, {0, 2}), Scalar::fraction(1, 2) * omega(0, 2));
  EXPECT_EQ(pfaffian_factor_recursive(omega, {0, 2}), Scalar::fraction(1, 2) * omega(0, 2));
}

TEST(Pfaffian, OddIndexSetRejected) {
  const FormMatrix omega(3, 3, base_chart(1, 1));
  EXPECT_THROW(pfaffian_factor_perm(omega, {0, 1, 2}), InvalidSplit);
  EXPECT_THROW(pfaffian_factor_recursive(omega, {0}), InvalidSplit);
  EXPECT_THROW(pfaffian_factor(omega, {0, 5}), DimensionMismatch);
}

TEST(PfaffianProperty, PermutationSumMatchesRecursion) {
  for (int seed = 1; seed <= 5; ++seed)
    for (std::size_t k = 2; k <= 6; k += 2) {
      // enough base directions for a nonzero top product
      const Chart c(static_cast<int>(k), 0, 0, 1);
      const FormMatrix omega = random_skew_two_forms(k, c, seed);
      std::vector<int> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<int>(i);
      EXPECT_EQ(pfaffian_factor_perm(omega, idx), pfaffian_factor_recursive(omega, idx)) << "k=" << k;
    }
}

TEST(MqForm, RankOne) {
  const Chart c(1, 1, 1, 2);
  const FormMatrix zero(1, 1, base_chart(1, 2));
  const GaussianChartForm phi = mq_form(c, zero, zero);
  EXPECT_EQ(phi.inner(), Scalar::pi_power(-1) * ChartForm::dx(c, 0));
}

TEST(MqForm, FlatRankTwo) {
  const Chart c(1, 2, 2, 2);
  const FormMatrix zero(2, 2, base_chart(1, 2));
  EXPECT_EQ(mq_form(c, zero, zero).inner(), Scalar::pi_power(-2) * top_dx(c));
}

TEST(MqForm, GeneralRankTwo) {
  const Chart c(2, 2, 2, 2);
  const FormMatrix theta = harness::random_skew_one_forms(2, base_chart(2, 2), 3);
  const FormMatrix omega = curvature_structure(theta);
  const FormMatrix th = theta.on_chart(c), om = omega.on_chart(c);
  std::vector<ChartForm> f;
  for (int i = 0; i < 2; ++i) {
    ChartForm fi = ChartForm::dx(c, i);
    for (int j = 0; j < 2; ++j) fi += wedge(th(i, j), ChartForm::x(c, j));
    f.push_back(fi);
  }
  const ChartForm expected = Scalar::pi_power(-2) * (wedge(f[0], f[1]) + Scalar::fraction(1, 2) * om(0, 1));
  EXPECT_EQ(mq_form(c, theta, omega).inner(), expected);
}

TEST(MqForm, ShapeMismatch) {
  const FormMatrix zero(2, 2, base_chart(1, 2));
  EXPECT_THROW(mq_form(Chart(1, 3, 3, 2), zero, zero), DimensionMismatch);
}

TEST(MqProperty, UnitFiberIntegral) {
  for (int n = 1; n <= 4; ++n)
    for (int seed = 1; seed <= 3; ++seed) {
      const Chart c(2, n, n, 2);
      const FormMatrix theta = harness::random_skew_one_forms(static_cast<std::size_t>(n), base_chart(2, 2), seed);
      const GaussianChartForm phi = mq_form(c, theta, curvature_structure(theta));
      EXPECT_EQ(fiber_integrate_last(phi, n).without_weight(), ChartForm::one(Chart(2, 0, 0, 2)));
    }
}

TEST(MqProperty, Closed) {
  for (int n = 1; n <= 3; ++n)
    for (int seed = 1; seed <= 3; ++seed) {
      const Chart c(2, n, n, 3);
      const FormMatrix theta = harness::random_skew_one_forms(static_cast<std::size_t>(n), base_chart(2, 3), seed);
      const GaussianChartForm phi = mq_form(c, theta, curvature_structure(theta));
      EXPECT_TRUE(equal_to_order(exterior_d(phi), GaussianChartForm(ChartForm(c)), 2)) << "n=" << n;
    }
}

TEST(MqProperty, ClosednessNeedsStructureEquation) {
  const Chart c(2, 2, 2, 3);
  const FormMatrix theta = harness::random_skew_one_forms(2, base_chart(2, 3), 5);
  const FormMatrix wrong = Scalar(2) * curvature_structure(theta);
  EXPECT_FALSE(equal_to_order(exterior_d(mq_form(c, theta, wrong)), GaussianChartForm(ChartForm(c)), 2));
}

TEST(MqProperty, ConstantFrameEquivariance) {
  const JetMatrix r2 = constant_matrix({{q(3, 5), q(-4, 5)}, {q(4, 5), q(3, 5)}}, 2, 2);
  const JetMatrix r3 = constant_matrix({{q(1, 3), q(-2, 3), q(2, 3)}, {q(2, 3), q(-1, 3), q(-2, 3)}, {q(2, 3), q(2, 3), q(1, 3)}}, 2, 2);
  ASSERT_EQ(r3.transpose() * r3, JetMatrix::identity(3, 2, 2));
  for (const JetMatrix& r : {r2, r3}) {
    const std::size_t n = r.rows();
    const Chart c(2, static_cast<int>(n), static_cast<int>(n), 2);
    for (int seed = 1; seed <= 3; ++seed) {
      const FormMatrix theta = harness::random_skew_one_forms(n, base_chart(2, 2), seed);
      const FormMatrix omega = curvature_structure(theta);
      const GaussianChartForm rotated_inputs =
          mq_form(c, r.transpose() * theta * r, r.transpose() * omega * r);
      EXPECT_EQ(rotated_inputs, substitute_fiber_frame(mq_form(c, theta, omega), r, c));
    }
  }
}
