#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rolljoint/geometry.hpp"
#include "support.hpp"

using namespace rolljoint;
using rolljoint::testing::random_pose;
using rolljoint::testing::random_twist;
using rolljoint::testing::uniform;

namespace {

constexpr double kPi = std::numbers::pi;

Mat3 homogeneous(double angle, double x, double y) {
  Mat3 m;
  m << std::cos(angle), -std::sin(angle), x, std::sin(angle), std::cos(angle), y, 0, 0, 1;
  return m;
}

}  // namespace

TEST(Pose2, ComposeIdentity) {
  const Pose2 I = Pose2::identity();
  EXPECT_TRUE((I * I).matrix().isIdentity(0.0));
}

TEST(Pose2, QuarterTurnsMakeHalfTurn) {
  const Pose2 q = Pose2::from_rotation(kPi / 2);
  const Pose2 h = q * q;
  EXPECT_NEAR(h.angle(), kPi, 1e-15);
  EXPECT_TRUE(h.translation().isZero(0.0));
  EXPECT_TRUE(h.rotation().isApprox((Mat2() << -1, 0, 0, -1).finished(), 1e-15));
}

TEST(Pose2, ComposeMatchesMatrixProduct) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const double a1 = uniform(rng, -4, 4), a2 = uniform(rng, -4, 4);
    const Vec2 t1(uniform(rng, -9, 9), uniform(rng, -9, 9)), t2(uniform(rng, -9, 9), uniform(rng, -9, 9));
    const Mat3 expect = homogeneous(a1, t1.x(), t1.y()) * homogeneous(a2, t2.x(), t2.y());
    EXPECT_LT(((Pose2(a1, t1) * Pose2(a2, t2)).matrix() - expect).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Pose2, RotationIsOrthonormal) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Mat2 R = random_pose(rng).rotation();
    EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
    EXPECT_TRUE((R.transpose() * R).isIdentity(1e-14));
  }
}

TEST(Pose2, Inverse) {
  EXPECT_TRUE(inverse(Pose2::identity()).matrix().isIdentity(0.0));
  const Pose2 t = inverse(Pose2::from_translation(Vec2(1, 0)));
  EXPECT_EQ(t.translation(), Vec2(-1, 0));
  EXPECT_EQ(t.angle(), 0.0);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 a = random_pose(rng);
    EXPECT_LT(((inverse(a) * a).matrix() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(((a * inverse(a)).matrix() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pose2, FromMatrixRoundTrip) {
  std::mt19937_64 rng(5);
  const Pose2 a = random_pose(rng);
  const Pose2 b = Pose2::from_matrix(a.matrix());
  EXPECT_LT((a.matrix() - b.matrix()).norm(), 1e-14);
}

TEST(Skew, Anticommutes) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const double w = uniform(rng, -3, 3);
    const Vec2 t(uniform(rng, -3, 3), uniform(rng, -3, 3));
    EXPECT_LT((skew(w) * t + skew(t) * w).norm(), 1e-15);
  }
  EXPECT_EQ(skew(Vec2(2, 5)), Vec2(5, -2));
}

TEST(Adjoint, ClosedForms) {
  EXPECT_TRUE(adjoint(Pose2::identity()).isIdentity(0.0));
  Mat3 expect;
  expect << 1, 0, 0, 0, 1, 0, -1, 0, 1;
  EXPECT_EQ(adjoint(Pose2::from_translation(Vec2(1, 0))), expect);
}

TEST(Adjoint, Homomorphism) {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose2 a = random_pose(rng), b = random_pose(rng);
    worst = std::max(worst, (adjoint(a * b) - adjoint(a) * adjoint(b)).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Adjoint, ConjugatesTwistMatrices) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    const Pose2 T = random_pose(rng);
    const Twist2 xi = random_twist(rng);
    const Mat3 lhs = hat(Twist2::from_vector(adjoint(T) * xi.vector()));
    EXPECT_LT((lhs - T.matrix() * hat(xi) * inverse(T).matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Coadjoint, ClosedForms) {
  EXPECT_TRUE(coadjoint(Pose2::identity()).isIdentity(0.0));
  const Wrench2 w = transform_wrench(Pose2::from_translation(Vec2(1, 0)), Wrench2{0.0, Vec2(0, 1)});
  EXPECT_DOUBLE_EQ(w.m, 1.0);
  EXPECT_EQ(w.f, Vec2(0, 1));
}

TEST(Coadjoint, IsInverseTransposeOfAdjoint) {
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose2 T = random_pose(rng);
    worst = std::max(worst, (coadjoint(T) - adjoint(inverse(T)).transpose()).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Coadjoint, TransformWrenchMatchesMatrix) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    const Pose2 T = random_pose(rng);
    const Wrench2 F{uniform(rng, -1, 1), Vec2(uniform(rng, -1, 1), uniform(rng, -1, 1))};
    EXPECT_LT((transform_wrench(T, F).vector() - coadjoint(T) * F.vector()).norm(), 1e-13);
  }
}

TEST(CoadjointSmall, ClosedForms) {
  EXPECT_TRUE(coadjoint_small(Twist2{}).isZero(0.0));
  const Vec3 out = coadjoint_small(Twist2{1.0, Vec2::Zero()}) * Wrench2{0.0, Vec2(1, 0)}.vector();
  EXPECT_LT((out - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(CoadjointSmall, IsRateOfCoadjoint) {
  std::mt19937_64 rng(31);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose2 T = random_pose(rng, 10.0);
    const Twist2 xi = random_twist(rng);
    const Mat3 fd = (coadjoint(T * exp(Twist2::from_vector(h * xi.vector()))) -
                     coadjoint(T * exp(Twist2::from_vector(-h * xi.vector())))) /
                    (2 * h);
    const Mat3 an = coadjoint(T) * coadjoint_small(xi);
    worst = std::max(worst, (fd - an).norm() / an.norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Exp, MatchesTwistMatrixAtOrigin) {
  std::mt19937_64 rng(37);
  const Twist2 xi = random_twist(rng);
  const double h = 1e-6;
  const Mat3 fd = (exp(Twist2::from_vector(h * xi.vector())).matrix() -
                   exp(Twist2::from_vector(-h * xi.vector())).matrix()) /
                  (2 * h);
  EXPECT_LT((fd - hat(xi)).norm(), 1e-9);
}

TEST(Exp, PureTranslationAndRotation) {
  const Pose2 t = exp(Twist2{0.0, Vec2(2, -1)});
  EXPECT_EQ(t.angle(), 0.0);
  EXPECT_LT((t.translation() - Vec2(2, -1)).norm(), 1e-15);
  // unit-speed travel along a circle of radius 1 for a quarter turn
  const Pose2 q = exp(Twist2{kPi / 2, Vec2(kPi / 2, 0)});
  EXPECT_NEAR(q.angle(), kPi / 2, 1e-15);
  EXPECT_LT((q.translation() - Vec2(1, 1)).norm(), 1e-14);
}
