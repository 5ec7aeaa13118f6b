#include "rolljoint/geometry.hpp"

#include <cmath>

namespace rolljoint {

Pose2 Pose2::from_matrix(const Mat3& m) {
  return {std::atan2(m(1, 0), m(0, 0)), m.block<2, 1>(0, 2)};
}

Mat2 Pose2::rotation() const {
  const double c = std::cos(angle_);
  const double s = std::sin(angle_);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat3 Pose2::matrix() const {
  Mat3 m = Mat3::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m.block<2, 1>(0, 2) = t_;
  return m;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  return {a.angle() + b.angle(), a.rotation() * b.translation() + a.translation()};
}

Pose2 inverse(const Pose2& a) {
  return {-a.angle(), -(a.rotation().transpose() * a.translation())};
}

Mat2 skew(double w) {
  Mat2 m;
  m << 0.0, -w, w, 0.0;
  return m;
}

Vec2 skew(const Vec2& t) { return {t.y(), -t.x()}; }

Mat3 hat(const Twist2& xi) {
  Mat3 m = Mat3::Zero();
  m.topLeftCorner<2, 2>() = skew(xi.w);
  m.block<2, 1>(0, 2) = xi.v;
  return m;
}

Pose2 exp(const Twist2& xi) {
  const double w = xi.w;
  // V(w) = (sin w / w) I + ((1 - cos w) / w) [1]
  double a;
  double b;
  if (std::abs(w) < 1e-8) {
    a = 1.0 - w * w / 6.0;
    b = 0.5 * w - w * w * w / 24.0;
  } else {
    a = std::sin(w) / w;
    b = (1.0 - std::cos(w)) / w;
  }
  Mat2 V;
  V << a, -b, b, a;
  return {w, V * xi.v};
}

Mat3 adjoint(const Pose2& T) {
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0;
  m.block<2, 1>(1, 0) = skew(T.translation());
  m.bottomRightCorner<2, 2>() = T.rotation();
  return m;
}

Mat3 coadjoint(const Pose2& T) {
  const Mat2 R = T.rotation();
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0;
  m.block<1, 2>(0, 1) = -skew(T.translation()).transpose() * R;
  m.bottomRightCorner<2, 2>() = R;
  return m;
}

Mat3 coadjoint_small(const Twist2& xi) {
  Mat3 m = Mat3::Zero();
  m.block<1, 2>(0, 1) = -skew(xi.v).transpose();
  m.bottomRightCorner<2, 2>() = skew(xi.w);
  return m;
}

Wrench2 transform_wrench(const Pose2& T, const Wrench2& F) {
  return Wrench2::from_vector(coadjoint(T) * F.vector());
}

}  // namespace rolljoint
