#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "rolljoint/geometry.hpp"

namespace rolljoint {

/// Closed interval [lo, hi] of arc length [mm].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double s, double slack = 0.0) const { return s >= lo - slack && s <= hi + slack; }
  double clamp(double s) const { return s < lo ? lo : (s > hi ? hi : s); }
};

/// Circle of the given radius traversed at unit speed. At arc length s the
/// contact point sits at angle reference_angle + orientation_sign * s / radius
/// about the center; orientation_sign = +1 is counter-clockwise travel.
struct CircularArc {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  double reference_angle = 0.0;
  int orientation_sign = 1;
};

/// Planar curve defined by its curvature u(s) = sum_k coeffs[k] s^k. The
/// contact frame at s = 0 is reference_frame.
struct CurvatureProfile {
  Pose2 reference_frame;
  std::vector<double> curvature_coeffs;
};

/// Arc-length parameterized contact surface of a link. frame_at(s) is the
/// contact frame in the link body frame (x tangent, y normal) and obeys
/// d/ds frame_at(s) = frame_at(s) [twist_at(s)] with twist_at(s) = (u(s), e_x).
class ContactSurface {
 public:
  enum class Kind { circular_arc, curvature_profile };

  static ContactSurface circular_arc(const CircularArc& arc, Interval domain);
  static ContactSurface curvature_profile(CurvatureProfile profile, Interval domain);

  Kind kind() const;
  const CircularArc* as_circular_arc() const { return std::get_if<CircularArc>(&shape_); }
  const CurvatureProfile* as_curvature_profile() const;

  Interval domain() const { return domain_; }
  /// Throws DomainError when s is outside the domain by more than 1e-9 of its width.
  Pose2 frame_at(double s) const;
  Twist2 twist_at(double s) const;
  double curvature_at(double s) const;

 private:
  struct ProfileGrid;
  struct Profile {
    CurvatureProfile profile;
    std::shared_ptr<const ProfileGrid> grid;
  };

  ContactSurface(std::variant<CircularArc, Profile> shape, Interval domain)
      : shape_(std::move(shape)), domain_(domain) {}

  void check_domain(double s) const;

  std::variant<CircularArc, Profile> shape_;
  Interval domain_;
};

}  // namespace rolljoint
