#include "rolljoint/loads.hpp"

namespace rolljoint {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// X = [[R^T, q], [0, 1]] maps the world-fixed wrench into the body frame.
Pose2 workspace_map(const ConstantWorkspace& load, const Pose2& T) { return {-T.angle(), load.attach}; }

}  // namespace

Wrench2 evaluate(const LoadModel& load, const Pose2& T) {
  return std::visit(
      overloaded{
          [](const ConstantBody& l) { return l.wrench; },
          [&](const ConstantWorkspace& l) { return transform_wrench(workspace_map(l, T), l.wrench); },
          [&](const LinearSpring& l) {
            return Wrench2{0.0, -l.stiffness * (T.rotation().transpose() * (T.translation() - l.anchor))};
          },
      },
      load);
}

Mat3 derivative(const LoadModel& load, const Pose2& T) {
  return std::visit(
      overloaded{
          [](const ConstantBody&) -> Mat3 { return Mat3::Zero(); },
          [&](const ConstantWorkspace& l) -> Mat3 {
            const Mat2 Rt = T.rotation().transpose();
            const Vec2 rf = Rt * skew(l.wrench.f);
            Mat3 d = Mat3::Zero();
            d(0, 0) = -skew(l.attach).dot(rf);
            d.block<2, 1>(1, 0) = rf;
            return d;
          },
          [&](const LinearSpring& l) -> Mat3 {
            Mat3 d = Mat3::Zero();
            d.block<2, 1>(1, 0) = -l.stiffness * T.rotation().transpose() * skew(Vec2(T.translation() - l.anchor));
            d.bottomRightCorner<2, 2>() = -l.stiffness * Mat2::Identity();
            return d;
          },
      },
      load);
}

Wrench2 link_load(std::span<const ExternalLoad> loads, std::size_t link, const Pose2& T) {
  Wrench2 total;
  for (const auto& l : loads)
    if (l.link == link) total += evaluate(l.model, T);
  return total;
}

Mat3 link_load_derivative(std::span<const ExternalLoad> loads, std::size_t link, const Pose2& T) {
  Mat3 total = Mat3::Zero();
  for (const auto& l : loads)
    if (l.link == link) total += derivative(l.model, T);
  return total;
}

ExternalLoad scaled(const ExternalLoad& load, double factor) {
  ExternalLoad out = load;
  std::visit(overloaded{[&](ConstantBody& l) { l.wrench = factor * l.wrench; },
                        [&](ConstantWorkspace& l) { l.wrench = factor * l.wrench; },
                        [&](LinearSpring& l) { l.stiffness *= factor; }},
             out.model);
  return out;
}

}  // namespace rolljoint
