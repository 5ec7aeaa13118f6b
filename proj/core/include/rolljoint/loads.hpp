#pragma once

#include <span>
#include <variant>

#include "rolljoint/geometry.hpp"

namespace rolljoint {

/// Wrench fixed in the link body frame.
struct ConstantBody {
  Wrench2 wrench;
};

/// Wrench fixed in the world frame, applied at a body-fixed point.
struct ConstantWorkspace {
  Wrench2 wrench;
  Vec2 attach = Vec2::Zero();
};

/// Linear spring from the link origin to a fixed world anchor.
struct LinearSpring {
  double stiffness = 0.0;  // [N/mm]
  Vec2 anchor = Vec2::Zero();
};

using LoadModel = std::variant<ConstantBody, ConstantWorkspace, LinearSpring>;

struct ExternalLoad {
  LoadModel model;
  std::size_t link = 0;  // 0-based link index
};

/// The same load with its wrench (or stiffness) multiplied by factor.
ExternalLoad scaled(const ExternalLoad& load, double factor);

/// Load on a link with pose T, expressed in the link body frame.
Wrench2 evaluate(const LoadModel& load, const Pose2& T);
/// d(evaluate)/d(xi) for body-frame perturbations T (I + [xi]).
Mat3 derivative(const LoadModel& load, const Pose2& T);

/// Sum over every load targeting the link.
Wrench2 link_load(std::span<const ExternalLoad> loads, std::size_t link, const Pose2& T);
Mat3 link_load_derivative(std::span<const ExternalLoad> loads, std::size_t link, const Pose2& T);

}  // namespace rolljoint
