#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "locsdp/errors.hpp"
#include "locsdp/geometry.hpp"
#include "reference.hpp"

using namespace locsdp;

namespace {

DenseVector vec(std::initializer_list<double> v) {
  DenseVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Project, IdentityKeepsVector) {
  const DenseVector x = vec({0.3, 0.7});
  EXPECT_TRUE(project(OrthoProjection::identity(2), x).isApprox(x, 1e-15));
}

TEST(Project, CoordinateProjectionZeroesOthers) {
  const DenseVector y = project(OrthoProjection::coordinates(2, {0}), vec({0.3, 0.7}));
  EXPECT_DOUBLE_EQ(y(0), 0.3);
  EXPECT_DOUBLE_EQ(y(1), 0.0);
}

TEST(Project, RankOneDiagonal) {
  DenseMatrix span(2, 1);
  span << 1.0, 1.0;
  const DenseVector y = project(OrthoProjection::from_span(span), vec({1.0, 0.0}));
  EXPECT_NEAR(y(0), 0.5, 1e-12);
  EXPECT_NEAR(y(1), 0.5, 1e-12);
}

TEST(Project, DimensionMismatchThrows) {
  try {
    project(OrthoProjection::identity(3), vec({1.0, 2.0}));
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Project, ZeroProjectionHasRankZero) {
  const OrthoProjection p = OrthoProjection::zero(3);
  EXPECT_EQ(p.rank(), 0);
  EXPECT_EQ(p.null_basis().cols(), 3);
  EXPECT_NEAR(project(p, vec({1, 2, 3})).norm(), 0.0, 1e-15);
}

TEST(Project, DependentSpanDropsRank) {
  DenseMatrix span(3, 3);
  span << 1, 2, 0, 1, 2, 0, 0, 0, 1;
  EXPECT_EQ(OrthoProjection::from_span(span).rank(), 2);
}

// Property: idempotence, symmetry and orthonormality on random projections.
TEST(ProjectProperty, IdempotentSymmetricOrthonormal) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    const int m = 1 + trial % n;
    DenseMatrix span(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) span(i, j) = g(rng);
    }
    const OrthoProjection p = OrthoProjection::from_span(span);
    const DenseMatrix b = p.basis();
    EXPECT_LE((b.transpose() * b - DenseMatrix::Identity(p.rank(), p.rank())).norm(), 1e-10);
    const DenseMatrix mat = p.matrix();
    EXPECT_LE((mat - mat.transpose()).norm(), 1e-10);
    DenseVector x(n);
    for (int i = 0; i < n; ++i) x(i) = g(rng);
    const DenseVector px = p.apply(x);
    EXPECT_LE((p.apply(px) - px).norm(), 1e-9);
    EXPECT_LE((px + p.apply_complement(x) - x).norm(), 1e-9);
    EXPECT_LE((p.basis().transpose() * p.null_basis()).norm(), 1e-9);
  }
}

TEST(ProjectProperty, CoordinateFastPathMatchesDense) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  const OrthoProjection fast = OrthoProjection::coordinates(6, {4, 1, 3});
  DenseMatrix span = DenseMatrix::Zero(6, 3);
  span(4, 0) = span(1, 1) = span(3, 2) = 1.0;
  const OrthoProjection dense = OrthoProjection::from_span(span);
  EXPECT_TRUE(fast.is_coordinate());
  for (int t = 0; t < 50; ++t) {
    DenseVector x(6);
    for (int i = 0; i < 6; ++i) x(i) = u(rng);
    EXPECT_LE((fast.apply(x) - dense.apply(x)).norm(), 1e-12);
    EXPECT_LE((fast.apply_complement(x) - dense.apply_complement(x)).norm(), 1e-12);
  }
}

// Property: every chart point stays on the slice.
TEST(AffineSliceProperty, ChartPointsStayOnSlice) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 5;
    const int m = 1 + trial % (n - 1);
    DenseMatrix span(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) span(i, j) = g(rng);
    }
    const OrthoProjection p = OrthoProjection::from_span(span);
    DenseVector raw(n);
    for (int i = 0; i < n; ++i) raw(i) = g(rng);
    const AffineSlice slice(p, p.apply(raw));
    EXPECT_EQ(slice.chart_dim(), n - p.rank());
    DenseVector z(slice.chart_dim());
    for (int i = 0; i < z.size(); ++i) z(i) = g(rng);
    const DenseVector y = slice.point(z);
    EXPECT_LE((p.apply(y) - slice.anchor()).norm(), 1e-9);
  }
}

TEST(AffineSlice, AnchorOutsideSpanRejected) {
  EXPECT_THROW(AffineSlice(OrthoProjection::coordinates(2, {0}), vec({0.5, 0.5})),
               Error);
}

TEST(AffineSlice, CoordinatePullBackSelectsFreeCoordinates) {
  const AffineSlice s(OrthoProjection::coordinates(3, {1}), vec({0, 0.4, 0}));
  const DenseVector g = s.pull_back(vec({2.0, 5.0, -1.0}));
  ASSERT_EQ(g.size(), 2);
  EXPECT_DOUBLE_EQ(g.cwiseAbs().sum(), 3.0);
}

TEST(ShrinkPolytope, UnitInterval) {
  Polytope p(1);
  p.add_row(vec({1.0}), 1.0, 0);
  p.add_row(vec({-1.0}), 0.0, 1);
  const Polytope s = shrink_polytope(p, 0.1);
  EXPECT_NEAR(s.offset(0), 0.9, 1e-15);
  EXPECT_NEAR(s.offset(1), -0.1, 1e-15);
  EXPECT_EQ(s.tag(0), 0);
  EXPECT_EQ(s.tag(1), 1);
}

TEST(ShrinkPolytope, RowNormFive) {
  Polytope p(2);
  p.add_row(vec({3.0, 4.0}), 10.0, 7);
  EXPECT_NEAR(shrink_polytope(p, 1.0).offset(0), 5.0, 1e-12);
}

TEST(ShrinkPolytope, ZeroEpsIsIdentity) {
  Polytope p(2);
  p.add_row(vec({3.0, 4.0}), 10.0, 7);
  const Polytope s = shrink_polytope(p, 0.0);
  EXPECT_EQ(s.offset(0), 10.0);
  EXPECT_TRUE(s.row(0).isApprox(p.row(0)));
}

TEST(Polytope, ZeroRowRejected) {
  Polytope p(2);
  EXPECT_THROW(p.add_row(vec({0.0, 0.0}), 1.0, 0), Error);
}

// Property: points of the shrunk polytope lie in the original, at depth eps.
TEST(ShrinkPolytopeProperty, ShrunkInsideOriginal) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Polytope p(3);
    for (int r = 0; r < 6; ++r) p.add_row(vec({g(rng), g(rng), g(rng)}), 0.5 + u(rng) * 0.3, r);
    const double eps = 0.05 + 0.1 * (trial % 3);
    const Polytope s = shrink_polytope(p, eps);
    for (int k = 0; k < 500; ++k) {
      const DenseVector x = vec({u(rng), u(rng), u(rng)});
      if (!s.contains(x)) continue;
      EXPECT_TRUE(p.contains(x));
      // The ball of radius eps around x stays inside the original.
      for (int r = 0; r < p.num_rows(); ++r) {
        EXPECT_LE(p.row(r).dot(x) + eps * p.row(r).norm(), p.offset(r) + 1e-12);
      }
    }
  }
}

TEST(BallVolume, Examples) {
  EXPECT_NEAR(ball_volume(1, 0.7), 1.4, 1e-14);
  EXPECT_NEAR(ball_volume(2, 1.0), std::numbers::pi, 1e-14);
  EXPECT_NEAR(ball_radius(2, std::numbers::pi), 1.0, 1e-14);
  EXPECT_EQ(ball_volume(0, 0.3), 1.0);
}

TEST(BallVolumeProperty, MatchesRecurrenceAndRoundTrips) {
  for (int d = 1; d <= 40; ++d) {
    for (double r : {1e-3, 0.25, 1.0, 2.5}) {
      const double v = ball_volume(d, r);
      EXPECT_NEAR(v / ref::ball_volume(d, r), 1.0, 1e-10) << d << " " << r;
      EXPECT_NEAR(ball_radius(d, v) / r, 1.0, 1e-10);
    }
  }
}

TEST(BallVolume, LogFormSurvivesUnderflow) {
  const double lv = log_ball_volume(500, 1e-6);
  EXPECT_TRUE(std::isfinite(lv));
  EXPECT_EQ(ball_volume(500, 1e-6), 0.0);
}
