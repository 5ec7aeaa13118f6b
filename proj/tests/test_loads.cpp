#include <random>

#include <gtest/gtest.h>

#include "rolljoint/loads.hpp"
#include "support.hpp"

using namespace rolljoint;
using namespace rolljoint::testing;

namespace {

// Central difference of evaluate() under T (I + [dxi]).
Mat3 fd_derivative(const LoadModel& load, const Pose2& T, double h = 1e-6) {
  Mat3 out;
  for (int c = 0; c < 3; ++c) {
    const Vec3 e = Vec3::Unit(c) * h;
    out.col(c) = (evaluate(load, T * exp(Twist2::from_vector(e))).vector() -
                  evaluate(load, T * exp(Twist2::from_vector(-e))).vector()) /
                 (2 * h);
  }
  return out;
}

double rel_error(const Mat3& a, const Mat3& b) {
  const double scale = std::max(b.norm(), 1e-12);
  return (a - b).norm() / scale;
}

LoadModel random_model(std::mt19937_64& rng, int variant) {
  const Wrench2 w{uniform(rng, -2, 2), Vec2(uniform(rng, -2, 2), uniform(rng, -2, 2))};
  const Vec2 q(uniform(rng, -20, 20), uniform(rng, -20, 20));
  switch (variant) {
    case 0: return ConstantBody{w};
    case 1: return ConstantWorkspace{w, q};
    default: return LinearSpring{uniform(rng, 0.01, 2.0), q};
  }
}

}  // namespace

TEST(Loads, ConstantBodyIsVerbatim) {
  std::mt19937_64 rng(83);
  const Wrench2 w{0.3, Vec2(1, -2)};
  for (int i = 0; i < 10; ++i) {
    const Pose2 T = random_pose(rng);
    EXPECT_EQ(evaluate(ConstantBody{}, T).vector(), Vec3::Zero());
    EXPECT_EQ(evaluate(ConstantBody{w}, T).vector(), w.vector());
    EXPECT_TRUE(derivative(ConstantBody{w}, T).isZero(0.0));
  }
}

TEST(Loads, SpringAtAnchorIsSlack) {
  const Pose2 T(0.8, Vec2(3, 4));
  const LinearSpring spring{1.0, Vec2(3, 4)};
  EXPECT_TRUE(evaluate(spring, T).vector().isZero(0.0));
  Mat3 expect = Mat3::Zero();
  expect.bottomRightCorner<2, 2>() = -Mat2::Identity();
  EXPECT_LT((derivative(spring, T) - expect).norm(), 1e-15);
}

TEST(Loads, SpringPullsTowardAnchor) {
  const Wrench2 w = evaluate(LinearSpring{0.5, Vec2(10, 0)}, Pose2::identity());
  EXPECT_EQ(w.m, 0.0);
  EXPECT_LT((w.f - Vec2(5, 0)).norm(), 1e-15);
}

TEST(Loads, WorkspaceForceAtUnitLever) {
  const Wrench2 w = evaluate(ConstantWorkspace{{0.0, Vec2(0, -1)}, Vec2(1, 0)}, Pose2::identity());
  EXPECT_NEAR(w.m, -1.0, 1e-15);
  EXPECT_LT((w.f - Vec2(0, -1)).norm(), 1e-15);
}

TEST(Loads, WorkspaceForceStaysFixedInWorld) {
  const Pose2 T = Pose2::from_rotation(0.5);
  const Wrench2 w = evaluate(ConstantWorkspace{{0.0, Vec2(1, 0)}, Vec2::Zero()}, T);
  EXPECT_LT((T.rotation() * w.f - Vec2(1, 0)).norm(), 1e-15);
}

TEST(Loads, WorkspaceMomentHasZeroDerivative) {
  std::mt19937_64 rng(89);
  const ConstantWorkspace pure{{0.7, Vec2::Zero()}, Vec2(3, -1)};
  for (int i = 0; i < 20; ++i) {
    const Pose2 T = random_pose(rng);
    EXPECT_TRUE(derivative(pure, T).isZero(0.0));
    EXPECT_LT(fd_derivative(pure, T).norm(), 1e-8);
  }
}

TEST(Loads, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(97);
  for (int variant = 0; variant < 3; ++variant) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const LoadModel model = random_model(rng, variant);
      const Pose2 T = random_pose(rng);
      const Mat3 an = derivative(model, T);
      if (variant == 0) {
        EXPECT_TRUE(an.isZero(0.0));
        continue;
      }
      worst = std::max(worst, rel_error(an, fd_derivative(model, T)));
    }
    EXPECT_LT(worst, 1e-5) << "variant " << variant;
  }
}

TEST(Loads, SuperpositionPerLink) {
  std::mt19937_64 rng(101);
  const std::vector<ExternalLoad> loads{{random_model(rng, 1), 2}, {random_model(rng, 2), 2}, {random_model(rng, 0), 1}};
  const Pose2 T = random_pose(rng);
  const Vec3 sum = evaluate(loads[0].model, T).vector() + evaluate(loads[1].model, T).vector();
  EXPECT_LT((link_load(loads, 2, T).vector() - sum).norm(), 1e-14);
  EXPECT_LT((link_load_derivative(loads, 2, T) - derivative(loads[0].model, T) - derivative(loads[1].model, T)).norm(),
            1e-14);
  EXPECT_TRUE(link_load(loads, 0, T).vector().isZero(0.0));
}

TEST(Loads, ScaledMultipliesTheLoad) {
  std::mt19937_64 rng(103);
  for (int variant = 0; variant < 3; ++variant) {
    const ExternalLoad load{random_model(rng, variant), 1};
    const Pose2 T = random_pose(rng);
    EXPECT_LT((evaluate(scaled(load, 2.5).model, T).vector() - 2.5 * evaluate(load.model, T).vector()).norm(), 1e-12);
    EXPECT_EQ(scaled(load, 2.5).link, 1u);
  }
}
