#include <gtest/gtest.h>

#include "support.hpp"

using namespace mqthom;
using namespace mqthom::testing;

namespace {

OrthoJetMatrix random_frame(std::size_t n, int d, int k, std::uint64_t seed, std::uint64_t stream = 0) {
  return cayley(harness::random_skew_jet(n, d, k, seed, stream));
}

}  // namespace

TEST(MaurerCartan, IdentityGivesZero) { EXPECT_TRUE(maurer_cartan(OrthoJetMatrix::identity(3, 2, 2)).is_zero()); }

TEST(MaurerCartan, SkewBelowTopOrder) {
  for (int seed = 1; seed <= 10; ++seed) {
    const FormMatrix mc = maurer_cartan(random_frame(3, 2, 3, seed));
    EXPECT_TRUE(mc.is_skew_to(2));
  }
}

TEST(MaurerCartan, BlockDiagonalFrame) {
  const OrthoJetMatrix a1 = random_frame(2, 1, 3, 3, 1), a2 = random_frame(2, 1, 3, 3, 2);
  const OrthoJetMatrix a(JetMatrix::block_diagonal(a1.matrix(), a2.matrix()));
  EXPECT_EQ(maurer_cartan(a), FormMatrix::block_diagonal(maurer_cartan(a1), maurer_cartan(a2)));
}

TEST(MaurerCartan, RejectsRectangularFrame) {
  JetMatrix tall(2, 1, 1, 2);
  tall(0, 0) = cst(1, 2, 1);
  EXPECT_THROW(maurer_cartan(OrthoJetMatrix(tall)), NotOrthogonal);
}

TEST(MaurerCartanProperty, FlatAmbientConnection) {
  for (int seed = 1; seed <= 10; ++seed) {
    const FormMatrix mc = maurer_cartan(random_frame(3, 2, 3, seed));
    EXPECT_TRUE(equal_to_order(curvature_structure(mc), FormMatrix(3, 3, mc.chart()), 1));
  }
}

TEST(Block, Extraction) {
  const Chart c = base_chart(1, 2);
  FormMatrix m(3, 3, c);
  EXPECT_TRUE(block(m, Block::oo, 2).is_zero());
  EXPECT_EQ(block(m, Block::oo, 2).rows(), 2u);
  const FormMatrix p = harness::random_skew_one_forms(2, c, 1), r = harness::random_skew_one_forms(1, c, 2);
  EXPECT_TRUE(block(FormMatrix::block_diagonal(p, r), Block::oh, 2).is_zero());
  EXPECT_THROW(block(m, Block::oo, 4), DimensionMismatch);
}

TEST(Block, Reassembly) {
  const Chart c = base_chart(2, 2);
  const FormMatrix m = maurer_cartan(random_frame(4, 2, 2, 9), c);
  FormMatrix re(4, 4, c);
  re.set_block(0, 0, block(m, Block::oo, 1));
  re.set_block(0, 1, block(m, Block::oh, 1));
  re.set_block(1, 0, block(m, Block::ho, 1));
  re.set_block(1, 1, block(m, Block::hh, 1));
  EXPECT_EQ(re, m);
}

TEST(RestrictedConnection, IdentityFrame) {
  const Connection conn = restricted_connection(OrthoJetMatrix::identity(3, 1, 2), 2);
  EXPECT_TRUE(conn.theta.is_zero());
  EXPECT_TRUE(conn.omega.is_zero());
}

TEST(RestrictedConnection, BlockDiagonalFrameIsFlat) {
  const OrthoJetMatrix a(JetMatrix::block_diagonal(random_frame(2, 2, 3, 4, 1).matrix(),
                                                   random_frame(1, 2, 3, 4, 2).matrix()));
  EXPECT_TRUE(restricted_connection(a, 2).omega.is_zero());
}

TEST(RestrictedConnection, BothCurvatureRoutesAgree) {
  for (int seed = 1; seed <= 5; ++seed) {
    const Connection conn = restricted_connection(random_frame(3, 1, 3, seed), 2);
    EXPECT_TRUE(conn.theta.is_skew_to(2));
    EXPECT_TRUE(equal_to_order(conn.omega, curvature_structure(conn.theta), 1));
  }
}

TEST(Curvature, ZeroConnection) {
  const FormMatrix z(2, 2, base_chart(2, 2));
  EXPECT_TRUE(curvature_structure(z).is_zero());
}

TEST(Curvature, ConstantOneVariableConnectionIsFlat) {
  const Chart c = base_chart(1, 2);
  FormMatrix theta(2, 2, c);
  theta(0, 1) = Scalar(3) * ChartForm::dt(c, 0);
  theta(1, 0) = Scalar(-3) * ChartForm::dt(c, 0);
  EXPECT_TRUE(curvature_structure(theta).is_zero());
}

TEST(Constrain, IdentityInvolution) {
  const FormMatrix theta = harness::random_skew_one_forms(3, base_chart(2, 2), 5);
  EXPECT_EQ(constrain(theta, JetMatrix::identity(3, 2, 2)), theta);
}

TEST(Constrain, AxisReflectionGivesDiagonalBlocks) {
  const Chart c = base_chart(2, 2);
  const FormMatrix theta = harness::random_skew_one_forms(3, c, 5);
  const FormMatrix result = constrain(theta, reflection_q0(2, 1, 2, 2));
  EXPECT_EQ(result, FormMatrix::block_diagonal(block(theta, Block::oo, 2), block(theta, Block::hh, 2)));
}

TEST(Constrain, NestedAxisRestriction) {
  const Chart c = base_chart(1, 2);
  const FormMatrix theta = harness::random_skew_one_forms(4, c, 8);
  const FormMatrix via =
      block(constrain(block(constrain(theta, reflection_q0(3, 1, 1, 2)), Block::oo, 3), reflection_q0(1, 2, 1, 2)),
            Block::oo, 1);
  EXPECT_EQ(via, block(constrain(theta, reflection_q0(1, 3, 1, 2)), Block::oo, 1));
}

TEST(Constrain, RejectsNonInvolution) {
  const FormMatrix theta(2, 2, base_chart(1, 2));
  EXPECT_THROW(constrain(theta, cst(1, 2, 2) * JetMatrix::identity(2, 1, 2)), NotInvolution);
  EXPECT_THROW(constrain(theta, JetMatrix::identity(3, 1, 2)), DimensionMismatch);
}

TEST(ConstrainProperty, Idempotent) {
  for (int seed = 1; seed <= 5; ++seed) {
    const Chart c = base_chart(2, 3);
    const FormMatrix theta = harness::random_skew_one_forms(3, c, seed);
    const JetMatrix a = random_frame(3, 2, 3, seed, 1).matrix();
    const JetMatrix qm = a * reflection_q0(1, 2, 2, 3) * a.transpose();
    const FormMatrix once = constrain(theta, qm);
    EXPECT_TRUE(equal_to_order(constrain(once, qm), once, 2));
  }
}

TEST(ConstrainProperty, DirectSum) {
  for (int seed = 1; seed <= 5; ++seed) {
    const Chart c = base_chart(1, 2);
    const FormMatrix t1 = harness::random_skew_one_forms(2, c, seed, 1), t2 = harness::random_skew_one_forms(3, c, seed, 2);
    const JetMatrix a1 = random_frame(2, 1, 2, seed, 3).matrix(), a2 = random_frame(3, 1, 2, seed, 4).matrix();
    const JetMatrix q1 = a1 * reflection_q0(1, 1, 1, 2) * a1.transpose();
    const JetMatrix q2 = a2 * reflection_q0(2, 1, 1, 2) * a2.transpose();
    EXPECT_EQ(constrain(FormMatrix::block_diagonal(t1, t2), JetMatrix::block_diagonal(q1, q2)),
              FormMatrix::block_diagonal(constrain(t1, q1), constrain(t2, q2)));
  }
}

TEST(FormMatrix, DifferentialOfJets) {
  const Chart c = base_chart(2, 2);
  JetMatrix m(1, 1, 2, 2);
  m(0, 0) = tvar(2, 2, 0) * tvar(2, 2, 1);
  const FormMatrix dm = FormMatrix::differential(m, c);
  EXPECT_EQ(dm(0, 0), tvar(2, 2, 1) * ChartForm::dt(c, 0) + tvar(2, 2, 0) * ChartForm::dt(c, 1));
}

TEST(FormMatrix, ShapeChecks) {
  const Chart c = base_chart(1, 2);
  EXPECT_THROW(FormMatrix(2, 3, c) * FormMatrix(2, 3, c), DimensionMismatch);
  EXPECT_THROW(FormMatrix(2, 2, c) + FormMatrix(3, 3, c), DimensionMismatch);
}
