#pragma once

#include <span>
#include <vector>

#include "rolljoint/geometry.hpp"
#include "rolljoint/loads.hpp"
#include "rolljoint/mechanism.hpp"

namespace rolljoint {

/// Segments shorter than this [mm] have no usable direction.
inline constexpr double kDegenerateSegment = 1e-9;

/// First-order model of one link's equations (links 2..n):
///   [I 0; C D] [dxi_i; deta_i] + [A B; 0 E] [dxi_{i-1}; deta_{i-1}] = eps_i
/// with deta = (ds, df), eps_i = (0, -h_i), and F = dh/dtau.
struct LinkBlocks {
  Mat3 A = Mat3::Zero();
  Mat3 B = Mat3::Zero();  // only the first (ds) column is nonzero
  Mat3 C = Mat3::Zero();
  Mat3 D = Mat3::Identity();
  Mat3 E = Mat3::Zero();
  Mat32 F = Mat32::Zero();
  Vec3 h = Vec3::Zero();
};

/// Unscaled equilibrium residual h for links 1..n-1 (0-based), moment first.
std::vector<Vec3> residual(const MechanismDesign& design, const Configuration& config,
                           const TendonPair& tension, std::span<const ExternalLoad> loads);

/// Residual with moment rows divided by the characteristic length [N].
std::vector<Vec3> scaled_residual(const MechanismDesign& design, std::span<const Vec3> h);
double scaled_residual_norm(const MechanismDesign& design, std::span<const Vec3> h);

struct DirectionDerivatives {
  Vec2 dv_hat;  // d v_hat / d s at the joint, link k coordinates
  Vec2 dw_hat;  // d w_hat / d s at the joint, link k+1 coordinates
};
DirectionDerivatives tendon_direction_derivatives(const MechanismDesign& design, std::size_t joint,
                                                  double s, Side side);

/// d v / d s at a joint (link k coordinates), used for tendon length rates.
Vec2 tendon_segment_rate(const MechanismDesign& design, std::size_t joint, double s, Side side);

/// Contact forces that satisfy the force rows of every link equation at the
/// configuration's contact parameters, propagated from the tip to the base.
/// Only the moment rows of the residual remain nonzero.
Configuration balance_contact_forces(const MechanismDesign& design, Configuration config,
                                     const TendonPair& tension, std::span<const ExternalLoad> loads);

/// Blocks for links 1..n-1 (0-based). The tip block uses D = I.
std::vector<LinkBlocks> assemble_blocks(const MechanismDesign& design, const Configuration& config,
                                        const TendonPair& tension, std::span<const ExternalLoad> loads);

}  // namespace rolljoint
