#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rolljoint/geometry.hpp"
#include "rolljoint/surface.hpp"

namespace rolljoint {

enum class Side { left = 0, right = 1 };
inline constexpr std::array<Side, 2> kSides{Side::left, Side::right};
inline constexpr std::size_t index(Side j) { return static_cast<std::size_t>(j); }

/// (left, right) pair: tensions [N] or tendon lengths [mm].
using TendonPair = Eigen::Vector2d;

/// Gravity used for gram-force conversions [m/s^2].
inline constexpr double kStandardGravity = 9.80665;
inline double gram_force_to_newton(double grams) { return grams * 1e-3 * kStandardGravity; }

/// One rigid link. All points and surfaces are in the link's body frame.
/// The base link has no parent surface and the tip link no child surface.
struct LinkDesign {
  std::string name;
  std::optional<ContactSurface> parent_surface;
  std::optional<ContactSurface> child_surface;
  std::array<Vec2, 2> parent_entry{Vec2::Zero(), Vec2::Zero()};  // p_l, p_r
  std::array<Vec2, 2> child_entry{Vec2::Zero(), Vec2::Zero()};   // c_l, c_r

  const Vec2& p(Side j) const { return parent_entry[index(j)]; }
  const Vec2& c(Side j) const { return child_entry[index(j)]; }
};

/// Serial chain of links joined by rolling contacts. Joint k (0-based) joins
/// link k to link k+1; its single contact parameter s_k addresses both the
/// child surface of link k and the parent surface of link k+1.
class MechanismDesign {
 public:
  MechanismDesign(std::vector<LinkDesign> links, Pose2 base_pose);

  const std::vector<LinkDesign>& links() const { return links_; }
  const LinkDesign& link(std::size_t i) const { return links_.at(i); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t joint_count() const { return links_.empty() ? 0 : links_.size() - 1; }
  const Pose2& base_pose() const { return base_pose_; }
  /// Mean link extent [mm]; divides moment rows so residual rows share force units.
  double characteristic_length() const { return characteristic_length_; }

  const ContactSurface& child_surface(std::size_t joint) const;
  const ContactSurface& parent_surface(std::size_t joint) const;
  /// Parameters admissible on both mating surfaces of a joint.
  Interval joint_domain(std::size_t joint) const;

  /// Pose of link joint+1 in the frame of link joint: T_c(s) T_p(s)^-1.
  Pose2 relative_pose(std::size_t joint, double s) const;

  MechanismDesign with_base_pose(const Pose2& base) const;

 private:
  std::vector<LinkDesign> links_;
  Pose2 base_pose_;
  double characteristic_length_ = 1.0;
};

/// Unknowns of the equilibrium problem plus the link poses they induce.
/// f[k] is the contact force on link k+1, expressed in its parent contact frame.
struct Configuration {
  std::vector<double> s;
  std::vector<Vec2> f;
  std::vector<Pose2> poses;
};

std::vector<Pose2> forward_poses(const MechanismDesign& design, std::span<const double> s);
Configuration make_configuration(const MechanismDesign& design, std::vector<double> s,
                                 std::vector<Vec2> f);
/// Contact parameters at the joint-domain midpoints, zero contact forces.
Configuration initial_configuration(const MechanismDesign& design);

/// Tendon segment vectors at one joint.
struct TendonSegment {
  Vec2 v;  // c_{j,k} -> p_{j,k+1}, in link k coordinates
  Vec2 w;  // p_{j,k+1} -> c_{j,k}, in link k+1 coordinates
};
TendonSegment tendon_segment(const MechanismDesign& design, std::size_t joint, double s, Side side);

/// Total tendon length from base to tip for each side [mm].
TendonPair tendon_lengths(const MechanismDesign& design, std::span<const double> s);
inline TendonPair tendon_lengths(const MechanismDesign& design, const Configuration& config) {
  return tendon_lengths(design, config.s);
}
/// The in-link part of the tendon lengths; independent of the configuration.
TendonPair in_link_tendon_lengths(const MechanismDesign& design);
/// Tendon lengths recomputed from world-frame link poses alone.
TendonPair tendon_lengths_from_poses(const MechanismDesign& design, std::span<const Pose2> poses);

/// Parameters of a chain of identical links joined by mirrored circular arcs
/// (convex child on top, convex parent below), tendons at x = -/+ tendon_offset.
struct UniformChainParams {
  double link_height = 20.0;
  double radius = 14.0;
  double tendon_offset = 6.0;
  double entry_inset = 2.0;  // entry points sit this far inside the top/bottom apex lines
  double domain_half_width = 16.8;
};
MechanismDesign make_uniform_chain(std::size_t link_count, const UniformChainParams& params = {},
                                   const Pose2& base_pose = Pose2::identity());

/// Human-readable invariant violations; empty when the design is usable.
std::vector<std::string> validate(const MechanismDesign& design);

}  // namespace rolljoint
