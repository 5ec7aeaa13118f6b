#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

namespace rolljoint {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Planar spatial velocity (w, v). When a surface frame is differentiated by
/// arc length, w is the curvature and v the unit tangent direction.
struct Twist2 {
  double w = 0.0;
  Vec2 v = Vec2::Zero();

  Vec3 vector() const { return {w, v.x(), v.y()}; }
  static Twist2 from_vector(const Vec3& x) { return {x(0), x.tail<2>()}; }
};

/// Planar spatial load (m, f): moment about the frame origin and force.
struct Wrench2 {
  double m = 0.0;
  Vec2 f = Vec2::Zero();

  Vec3 vector() const { return {m, f.x(), f.y()}; }
  static Wrench2 from_vector(const Vec3& x) { return {x(0), x.tail<2>()}; }

  Wrench2& operator+=(const Wrench2& o) {
    m += o.m;
    f += o.f;
    return *this;
  }
  friend Wrench2 operator+(Wrench2 a, const Wrench2& b) { return a += b; }
  friend Wrench2 operator*(double k, const Wrench2& a) { return {k * a.m, k * a.f}; }
};

/// Element of SE(2). The rotation is stored as an angle (not wrapped) so that
/// composition is exact angle addition; the 2x2 matrix is built on demand.
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double angle, const Vec2& translation) : angle_(angle), t_(translation) {}

  static Pose2 identity() { return {}; }
  static Pose2 from_translation(const Vec2& t) { return {0.0, t}; }
  static Pose2 from_rotation(double angle) { return {angle, Vec2::Zero()}; }
  /// Builds a pose from a homogeneous matrix; the angle is taken from atan2.
  static Pose2 from_matrix(const Mat3& m);

  double angle() const { return angle_; }
  Mat2 rotation() const;
  const Vec2& translation() const { return t_; }
  Mat3 matrix() const;

  /// Maps a point expressed in this frame to the parent frame: R p + t.
  Vec2 apply(const Vec2& p) const { return rotation() * p + t_; }

 private:
  double angle_ = 0.0;
  Vec2 t_ = Vec2::Zero();
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);
inline Pose2 operator*(const Pose2& a, const Pose2& b) { return compose(a, b); }

/// [w] as a 2x2 skew-symmetric matrix.
Mat2 skew(double w);
/// [t] = (t_y, -t_x), the planar reduction of the cross-product matrix.
Vec2 skew(const Vec2& t);

/// [xi] as an element of se(2).
Mat3 hat(const Twist2& xi);
/// Group exponential exp([xi]).
Pose2 exp(const Twist2& xi);

/// Ad_T, mapping twists expressed in the child frame to the parent frame.
Mat3 adjoint(const Pose2& T);
/// Ad*_T = [[1, -[t]^T R], [0, R]], mapping wrenches from the child frame to the parent frame.
Mat3 coadjoint(const Pose2& T);
/// ad*_xi = [[0, -[v]^T], [0, [w]]]; d/dt Ad*_T = Ad*_T ad*_xi when dT/dt = T [xi].
Mat3 coadjoint_small(const Twist2& xi);

Wrench2 transform_wrench(const Pose2& T, const Wrench2& F);

}  // namespace rolljoint
