#include <gtest/gtest.h>

#include "support.hpp"

using namespace mqthom;
using namespace mqthom::testing;

TEST(Moments, LowOrders) {
  EXPECT_EQ(gaussian_moment(0), Scalar::pi_power(1));
  EXPECT_EQ(gaussian_moment(1), Scalar());
  EXPECT_EQ(gaussian_moment(2), Scalar::pi_power(1, q(1, 2)));
  EXPECT_EQ(gaussian_moment(4), Scalar::pi_power(1, q(3, 4)));
  EXPECT_EQ(gaussian_moment(6), Scalar::pi_power(1, q(15, 8)));
  EXPECT_THROW(gaussian_moment(-1), DimensionMismatch);
}

namespace {

WickInput scalar_rows(const Chart& c, int l, const std::vector<std::vector<long>>& rows) {
  WickInput in{l, c, {}};
  for (const auto& r : rows) {
    std::vector<ChartForm> row;
    for (long v : r) row.push_back(ChartForm::constant(c, Scalar(v)));
    in.rows.push_back(row);
  }
  return in;
}

}  // namespace

TEST(Wick, OddRowCountVanishes) {
  const Chart c(1, 0, 0, 1);
  EXPECT_TRUE(wick(scalar_rows(c, 2, {{1, 2}})).is_zero());
  EXPECT_TRUE(wick(scalar_rows(c, 2, {{1, 2}, {3, 4}, {5, 6}})).is_zero());
}

TEST(Wick, EmptyProductIsGaussianVolume) {
  const Chart c(1, 0, 0, 1);
  EXPECT_EQ(wick(scalar_rows(c, 3, {})), ChartForm::constant(c, Scalar::pi_power(3)));
}

TEST(Wick, TwoScalarRows) {
  const Chart c(1, 0, 0, 1);
  // b1.b2 = 1*3 + 2*4 = 11
  const ChartForm expected = ChartForm::constant(c, Scalar::pi_power(2, q(11, 2)));
  EXPECT_EQ(wick(scalar_rows(c, 2, {{1, 2}, {3, 4}})), expected);
  EXPECT_EQ(wick_direct(scalar_rows(c, 2, {{1, 2}, {3, 4}})), expected);
}

TEST(Wick, TwoOneFormRows) {
  const Chart c(2, 0, 0, 1);
  const ChartForm dt1 = ChartForm::dt(c, 0), dt2 = ChartForm::dt(c, 1);
  WickInput in{2, c, {{dt1, Scalar(2) * dt2}, {dt2, dt1}}};
  // b1.b2 = dt1^dt2 + 2 dt2^dt1 = -dt1^dt2
  const ChartForm expected = Scalar::pi_power(2, q(1, 2)) * (-wedge(dt1, dt2));
  EXPECT_EQ(wick(in), expected);
  EXPECT_EQ(wick_direct(in), expected);
}

TEST(Wick, FourOneFormRowsNeedTheSign) {
  const Chart c(0, 4, 0, 1);
  std::vector<std::vector<ChartForm>> rows;
  for (int j = 0; j < 4; ++j) rows.push_back({ChartForm::dx(c, j), Scalar(j + 1) * ChartForm::dx(c, (j + 1) % 4)});
  const WickInput in{2, c, rows};
  EXPECT_FALSE(wick_direct(in).is_zero());
  EXPECT_EQ(wick(in), wick_direct(in));
  ScopedMutation flip(Mutation::wick_sigma_sign);
  EXPECT_NE(wick(in), wick_direct(in));
}

TEST(Wick, MixedDegreesRejected) {
  const Chart c(1, 0, 0, 1);
  WickInput in{1, c, {{ChartForm::one(c)}, {ChartForm::dt(c, 0)}}};
  EXPECT_THROW(wick(in), DegreeMismatch);
  WickInput two{1, c, {{ChartForm::one(c), ChartForm::one(c)}}};
  EXPECT_THROW(wick(two), DimensionMismatch);
}

TEST(WickProperty, AgreesWithDirectMoments) {
  for (int seed = 1; seed <= 10; ++seed)
    for (int l = 1; l <= 3; ++l)
      for (int s = 0; s <= 4; ++s)
        for (int degree = 0; degree <= 1; ++degree) {
          harness::CounterRng rng(seed, 100 * l + 10 * s + degree);
          const Chart c(2, degree ? s : 0, 0, 2);
          const WickInput in = harness::random_wick_input(l, s, degree, c, rng);
          EXPECT_EQ(wick(in), wick_direct(in)) << "l=" << l << " s=" << s << " degree=" << degree;
        }
}

TEST(FiberIntegrate, FullGaussianNormalization) {
  for (int n = 1; n <= 4; ++n) {
    const Chart c(1, n, n, 2);
    const GaussianChartForm phi(Scalar::pi_power(-n) * top_dx(c));
    EXPECT_EQ(fiber_integrate_last(phi, n).without_weight(), ChartForm::one(Chart(1, 0, 0, 2)));
  }
}

TEST(FiberIntegrate, OddMomentVanishes) {
  const Chart c(1, 1, 1, 2);
  const GaussianChartForm a(wedge(ChartForm::x(c, 0), ChartForm::dx(c, 0)));
  EXPECT_TRUE(fiber_integrate(a, {0}).is_zero());
}

TEST(FiberIntegrate, EmptySetIsIdentity) {
  const Chart c(1, 2, 1, 2);
  const GaussianChartForm a(rand_form(c, 2, 3));
  EXPECT_EQ(fiber_integrate(a, {}), a);
}

TEST(FiberIntegrate, ResidualBeforeIntegratedDifferentials) {
  const Chart c(1, 2, 1, 2);
  // dx2 ^ dt1 ^ dx1 = dt1 ^ dx1 ^ dx2 ... reordered: residual dt1 ^ dx1, then dx2
  const GaussianChartForm a(wedge(wedge(ChartForm::dx(c, 1), ChartForm::dt(c, 0)), ChartForm::dx(c, 0)));
  const Chart r(1, 1, 1, 2);
  EXPECT_EQ(fiber_integrate(a, {1}).inner(),
            Scalar::pi_power(1) * wedge(ChartForm::dt(r, 0), ChartForm::dx(r, 0)));
  ScopedMutation flip(Mutation::berezin_parity);
  EXPECT_EQ(fiber_integrate(a, {1}).inner(),
            Scalar::pi_power(1) * -wedge(ChartForm::dt(r, 0), ChartForm::dx(r, 0)));
}

TEST(FiberIntegrate, OrientationOrderMatters) {
  const Chart c(0, 2, 0, 1);
  const GaussianChartForm a(top_dx(c));
  const Chart point(0, 0, 0, 1);
  EXPECT_EQ(fiber_integrate(a, {0, 1}, {0, 1}).without_weight(), ChartForm::constant(point, Scalar::pi_power(2)));
  EXPECT_EQ(fiber_integrate(a, {0, 1}, {1, 0}).without_weight(), ChartForm::constant(point, -Scalar::pi_power(2)));
}

TEST(FiberIntegrate, InvalidIndexSets) {
  const GaussianChartForm a(ChartForm::one(Chart(1, 2, 1, 2)));
  EXPECT_THROW(fiber_integrate(a, {2}), DimensionMismatch);
  EXPECT_THROW(fiber_integrate(a, {0, 0}), DimensionMismatch);
  EXPECT_THROW(fiber_integrate(a, {0, 1}, {0}), DimensionMismatch);
}

TEST(FiberIntegrateProperty, IteratedIntegration) {
  const Chart c(1, 4, 2, 2);
  for (int seed = 1; seed <= 10; ++seed) {
    // forms of top fiber degree plus lower terms, so something survives
    const GaussianChartForm a(wedge(rand_form(c, 1, seed), top_dx(c)) + rand_form(c, 3, seed, 1) +
                              wedge(ChartForm::function(c, rand_jet(seed, 1, 2, 9)), top_dx(c)));
    const GaussianChartForm once = fiber_integrate(a, {2, 3});
    const GaussianChartForm twice = fiber_integrate(fiber_integrate(a, {3}), {2});
    EXPECT_EQ(once, twice);
    EXPECT_EQ(fiber_integrate(once, {0, 1}), fiber_integrate(a, {0, 1, 2, 3}));
  }
}

TEST(FiberIntegrateProperty, CommutesWithD) {
  const Chart c(2, 3, 1, 3);
  for (int seed = 1; seed <= 10; ++seed)
    for (int deg = 1; deg <= 4; ++deg) {
      const GaussianChartForm a(rand_form(c, deg, seed, deg));
      EXPECT_TRUE(equal_to_order(exterior_d(fiber_integrate_last(a, 2)), fiber_integrate_last(exterior_d(a), 2), 2));
    }
}

TEST(FiberIntegrateRotated, IdentityFrame) {
  const Chart c(1, 3, 1, 2);
  const GaussianChartForm a(wedge(rand_form(c, 1, 4), top_dx(c)) + rand_form(c, 3, 4, 1));
  EXPECT_EQ(fiber_integrate_rotated(a, OrthoJetMatrix::identity(3, 1, 2), 1), fiber_integrate_last(a, 2));
}

TEST(FiberIntegrateRotated, ConstantPartitionFrame) {
  for (std::size_t n = 1; n <= 2; ++n) {
    const int nn = static_cast<int>(n);
    const std::vector<Jet> xi{cst(1, 2, 3, 5), cst(1, 2, 4, 5)};
    const OrthoJetMatrix r(harness::patch_rotation(xi, n));
    const GaussianChartForm big(Scalar::pi_power(-2 * nn) * top_dx(Chart(1, 2 * nn, nn, 2)));
    const GaussianChartForm small(Scalar::pi_power(-nn) * top_dx(Chart(1, nn, nn, 2)));
    EXPECT_EQ(fiber_integrate_rotated(big, r, nn), small);
  }
}

TEST(PullbackInclusion, AxisInclusionRestricts) {
  const Chart big(1, 2, 1, 2);
  JetMatrix iota(2, 1, 1, 2);
  iota(0, 0) = cst(1, 2, 1);
  const ChartForm a = wedge(ChartForm::x(big, 0), ChartForm::dx(big, 0)) + ChartForm::dx(big, 1);
  const Chart small(1, 1, 1, 2);
  EXPECT_EQ(pullback_inclusion(a, iota), wedge(ChartForm::x(small, 0), ChartForm::dx(small, 0)));
}

TEST(PullbackInclusion, ConstantPartitionKeepsWeight) {
  const std::vector<Jet> xi{cst(1, 2, 3, 5), cst(1, 2, 4, 5)};
  const JetMatrix iota = harness::patch_inclusion(xi, 1);
  const GaussianChartForm w(ChartForm::one(Chart(1, 2, 1, 2)));
  EXPECT_EQ(pullback_inclusion(w, iota), GaussianChartForm(ChartForm::one(Chart(1, 1, 1, 2))));
  EXPECT_THROW(pullback_inclusion(w, cst(1, 2, 2) * iota), WeightNotPreserved);
}

TEST(PullbackInclusion, CommutesWithD) {
  for (int seed = 1; seed <= 5; ++seed) {
    const auto xi = harness::random_partition_of_unity(2, 1, 3, seed);
    const JetMatrix iota = harness::patch_inclusion(xi, 2);
    const Chart big(1, 4, 2, 3);
    for (int deg = 0; deg <= 2; ++deg) {
      const GaussianChartForm a(rand_form(big, deg, seed, deg));
      EXPECT_TRUE(equal_to_order(exterior_d(pullback_inclusion(a, iota)), pullback_inclusion(exterior_d(a), iota), 2));
    }
  }
}
