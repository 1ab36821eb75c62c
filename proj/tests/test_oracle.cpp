#include <gtest/gtest.h>

#include <random>

#include "locsdp/errors.hpp"
#include "locsdp/oracle.hpp"

using namespace locsdp;

namespace {

DenseVector vec(std::initializer_list<double> v) {
  DenseVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Polytope unit_box(int n) {
  Polytope p(n);
  for (int i = 0; i < n; ++i) {
    DenseVector e = DenseVector::Zero(n);
    e(i) = 1.0;
    p.add_row(e, 1.0, 2 * i);
    p.add_row(-e, 0.0, 2 * i + 1);
  }
  return p;
}

}  // namespace

TEST(PolytopeOracle, InteriorIsFeasible) {
  EXPECT_TRUE(is_feasible(polytope_oracle(unit_box(2))(vec({0.5, 0.5}), 1e-6)));
}

TEST(PolytopeOracle, ViolatedFace) {
  const auto r = polytope_oracle(unit_box(2))(vec({1.5, 0.5}), 0.0);
  ASSERT_FALSE(is_feasible(r));
  EXPECT_TRUE(std::get<Cut>(r).c.isApprox(vec({1.0, 0.0})));
}

TEST(PolytopeOracle, HalfplaneCutIsNormalizedRow) {
  Polytope p(2);
  p.add_row(vec({1.0, 1.0}), 1.0, 0);
  const auto r = polytope_oracle(p)(vec({1.0, 1.0}), 0.0);
  ASSERT_FALSE(is_feasible(r));
  EXPECT_TRUE(std::get<Cut>(r).c.isApprox(vec({1.0, 1.0})));
}

TEST(PolytopeOracle, SlackScalesWithRowNorm) {
  Polytope p(2);
  p.add_row(vec({3.0, 4.0}), 0.0, 0);
  // Excess 0.5 is exactly distance 0.1 from the face.
  const OracleHandle h = polytope_oracle(p);
  EXPECT_TRUE(is_feasible(h(vec({0.3, -0.1}) , 0.1 + 1e-12)));
  EXPECT_FALSE(is_feasible(h(vec({0.3, -0.1}), 0.09)));
}

TEST(BallOracle, Interior) {
  EXPECT_TRUE(is_feasible(ball_oracle(vec({0.5, 0.5}), 0.1)(vec({0.5, 0.55}), 0.0)));
}

TEST(BallOracle, CutAlongOffset) {
  const auto r = ball_oracle(vec({0.5, 0.5}), 0.1)(vec({0.9, 0.5}), 0.0);
  ASSERT_FALSE(is_feasible(r));
  EXPECT_TRUE(std::get<Cut>(r).c.isApprox(vec({1.0, 0.0})));
}

TEST(BallOracle, BoundaryWithSlack) {
  EXPECT_TRUE(is_feasible(ball_oracle(vec({0.5, 0.5}), 0.1)(vec({0.6, 0.5}), 1e-6)));
}

TEST(BallOracle, NonPositiveRadiusRejected) {
  EXPECT_THROW(ball_oracle(vec({0.0}), 0.0), Error);
}

// Property: every cut is valid for sampled body points and has unit inf-norm.
TEST(OracleProperty, CutsAreValidAndNormalized) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    DenseVector center(n);
    for (int i = 0; i < n; ++i) center(i) = 0.3 + 0.4 * u(rng);
    const double radius = 0.05 + 0.2 * u(rng);
    Polytope poly = unit_box(n);
    DenseVector row(n);
    for (int i = 0; i < n; ++i) row(i) = g(rng);
    poly.add_row(row, row.dot(center), 99);
    const OracleHandle handles[2] = {ball_oracle(center, radius), polytope_oracle(poly)};
    for (int which = 0; which < 2; ++which) {
      DenseVector y(n);
      for (int i = 0; i < n; ++i) y(i) = 2.0 * u(rng) - 0.5;
      const double delta = 1e-3 * u(rng);
      const auto r = handles[which](y, delta);
      if (is_feasible(r)) continue;
      const Cut& cut = std::get<Cut>(r);
      EXPECT_NEAR(cut.c.lpNorm<Eigen::Infinity>(), 1.0, 1e-9);
      for (int s = 0; s < 10000; ++s) {
        DenseVector x(n);
        if (which == 0) {
          for (int i = 0; i < n; ++i) x(i) = g(rng);
          x = center + radius * std::pow(u(rng), 1.0 / n) * x / x.norm();
        } else {
          for (int i = 0; i < n; ++i) x(i) = u(rng);
          if (!poly.contains(x)) continue;
        }
        ASSERT_LE(cut.c.dot(x), cut.c.dot(y) + delta + 1e-9);
      }
    }
  }
}
