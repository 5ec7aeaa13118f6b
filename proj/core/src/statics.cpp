#include "rolljoint/statics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rolljoint/errors.hpp"

namespace rolljoint {

namespace {

// Ad*_{I(q)} (0, f) = (q x f, f)
Vec3 point_force(const Vec2& q, const Vec2& f) { return {q.x() * f.y() - q.y() * f.x(), f.x(), f.y()}; }

Vec3 force_only(const Vec2& f) { return {0.0, f.x(), f.y()}; }

Vec2 unit(const Vec2& v, std::size_t joint, const char* which) {
  const double len = v.norm();
  if (!(len >= kDegenerateSegment)) {
    std::ostringstream os;
    os << "tendon segment " << which << " at joint " << joint + 1 << " has length " << len << " mm";
    throw DegenerateTendon(os.str());
  }
  return v / len;
}

Vec2 projected_rate(const Vec2& seg, const Vec2& rate, std::size_t joint, const char* which) {
  const Vec2 u = unit(seg, joint, which);
  return (Mat2::Identity() - u * u.transpose()) * rate / seg.norm();
}

// Everything about one joint that the link equations on both sides need.
struct JointState {
  Pose2 Tc;  // child contact frame on link k
  Pose2 Tp;  // parent contact frame on link k+1
  Pose2 X;   // link k+1 in link k
  double uc = 0.0;
  double up = 0.0;
  std::array<Vec2, 2> v_hat;
  std::array<Vec2, 2> w_hat;
};

JointState joint_state(const MechanismDesign& design, std::size_t k, double s) {
  JointState js;
  js.Tc = design.child_surface(k).frame_at(s);
  js.Tp = design.parent_surface(k).frame_at(s);
  js.X = js.Tc * inverse(js.Tp);
  js.uc = design.child_surface(k).curvature_at(s);
  js.up = design.parent_surface(k).curvature_at(s);
  const Pose2 Xinv = inverse(js.X);
  for (Side j : kSides) {
    const Vec2 v = js.X.apply(design.link(k + 1).p(j)) - design.link(k).c(j);
    const Vec2 w = Xinv.apply(design.link(k).c(j)) - design.link(k + 1).p(j);
    js.v_hat[index(j)] = unit(v, k, "v");
    js.w_hat[index(j)] = unit(w, k, "w");
  }
  return js;
}

std::vector<JointState> joint_states(const MechanismDesign& design, const Configuration& config) {
  if (config.s.size() != design.joint_count() || config.f.size() != design.joint_count() ||
      config.poses.size() != design.link_count())
    throw DomainError("configuration does not match the mechanism's joint count");
  std::vector<JointState> out;
  out.reserve(config.s.size());
  for (std::size_t k = 0; k < config.s.size(); ++k) out.push_back(joint_state(design, k, config.s[k]));
  return out;
}

Vec3 link_residual(const MechanismDesign& design, const Configuration& config, const TendonPair& tension,
                   std::span<const ExternalLoad> loads, std::span<const JointState> js, std::size_t i) {
  const LinkDesign& link = design.link(i);
  const JointState& below = js[i - 1];
  const bool has_child = i + 1 < design.link_count();
  Vec3 h = Vec3::Zero();
  for (Side j : kSides) {
    const double tau = tension(index(j));
    h += point_force(link.p(j), tau * below.w_hat[index(j)]);
    if (has_child) h += point_force(link.c(j), tau * js[i].v_hat[index(j)]);
  }
  h += coadjoint(below.Tp) * force_only(config.f[i - 1]);
  if (has_child) h -= coadjoint(js[i].Tc) * force_only(config.f[i]);
  h += link_load(loads, i, config.poses[i]).vector();
  return h;
}

}  // namespace

std::vector<Vec3> residual(const MechanismDesign& design, const Configuration& config,
                           const TendonPair& tension, std::span<const ExternalLoad> loads) {
  const auto js = joint_states(design, config);
  std::vector<Vec3> h;
  h.reserve(js.size());
  for (std::size_t i = 1; i < design.link_count(); ++i)
    h.push_back(link_residual(design, config, tension, loads, js, i));
  return h;
}

Configuration balance_contact_forces(const MechanismDesign& design, Configuration config,
                                     const TendonPair& tension, std::span<const ExternalLoad> loads) {
  const auto js = joint_states(design, config);
  const std::size_t n = design.link_count();
  for (std::size_t i = n - 1; i >= 1; --i) {
    const bool has_child = i + 1 < n;
    Vec2 rest = link_load(loads, i, config.poses[i]).f;
    for (Side j : kSides) {
      rest += tension(index(j)) * js[i - 1].w_hat[index(j)];
      if (has_child) rest += tension(index(j)) * js[i].v_hat[index(j)];
    }
    if (has_child) rest -= js[i].Tc.rotation() * config.f[i];
    config.f[i - 1] = -(js[i - 1].Tp.rotation().transpose() * rest);
  }
  return config;
}

std::vector<Vec3> scaled_residual(const MechanismDesign& design, std::span<const Vec3> h) {
  std::vector<Vec3> out(h.begin(), h.end());
  for (auto& r : out) r(0) /= design.characteristic_length();
  return out;
}

double scaled_residual_norm(const MechanismDesign& design, std::span<const Vec3> h) {
  double m = 0.0;
  for (const auto& r : scaled_residual(design, h)) m = std::max(m, r.lpNorm<Eigen::Infinity>());
  return m;
}

Vec2 tendon_segment_rate(const MechanismDesign& design, std::size_t joint, double s, Side side) {
  const Pose2 Tc = design.child_surface(joint).frame_at(s);
  const Pose2 Tp = design.parent_surface(joint).frame_at(s);
  const double du = design.child_surface(joint).curvature_at(s) - design.parent_surface(joint).curvature_at(s);
  const Pose2 X = Tc * inverse(Tp);
  return skew(du) * X.rotation() * (design.link(joint + 1).p(side) - Tp.translation());
}

DirectionDerivatives tendon_direction_derivatives(const MechanismDesign& design, std::size_t joint,
                                                  double s, Side side) {
  const Pose2 Tc = design.child_surface(joint).frame_at(s);
  const Pose2 Tp = design.parent_surface(joint).frame_at(s);
  const double uc = design.child_surface(joint).curvature_at(s);
  const double up = design.parent_surface(joint).curvature_at(s);
  const Pose2 X = Tc * inverse(Tp);
  const Pose2 Xinv = inverse(X);
  const Vec2& p = design.link(joint + 1).p(side);
  const Vec2& c = design.link(joint).c(side);

  const Vec2 v = X.apply(p) - c;
  const Vec2 w = Xinv.apply(c) - p;
  const Vec2 dv = skew(uc - up) * X.rotation() * (p - Tp.translation());
  const Vec2 dw = skew(up - uc) * Xinv.rotation() * (c - Tc.translation());
  return {projected_rate(v, dv, joint, "v"), projected_rate(w, dw, joint, "w")};
}

std::vector<LinkBlocks> assemble_blocks(const MechanismDesign& design, const Configuration& config,
                                        const TendonPair& tension, std::span<const ExternalLoad> loads) {
  const auto js = joint_states(design, config);
  const std::size_t n = design.link_count();
  std::vector<LinkBlocks> blocks(n - 1);

  for (std::size_t i = 1; i < n; ++i) {
    LinkBlocks& b = blocks[i - 1];
    const LinkDesign& link = design.link(i);
    const JointState& below = js[i - 1];
    const bool has_child = i + 1 < n;
    const double s_below = config.s[i - 1];

    b.A = -adjoint(inverse(below.X));
    b.B.col(0) = -adjoint(below.Tp) * Vec3(below.uc - below.up, 0.0, 0.0);
    b.C = link_load_derivative(loads, i, config.poses[i]);

    const Mat3 coad_p = coadjoint(below.Tp);
    for (Side j : kSides) {
      const double tau = tension(index(j));
      const auto dd = tendon_direction_derivatives(design, i - 1, s_below, j);
      b.E.col(0) += point_force(link.p(j), tau * dd.dw_hat);
      b.F.col(index(j)) += point_force(link.p(j), below.w_hat[index(j)]);
    }
    b.E.col(0) += coad_p * coadjoint_small(design.parent_surface(i - 1).twist_at(s_below)) *
                  force_only(config.f[i - 1]);
    b.E.rightCols<2>() = coad_p.rightCols<2>();

    if (has_child) {
      const Mat3 coad_c = coadjoint(js[i].Tc);
      b.D = Mat3::Zero();
      for (Side j : kSides) {
        const double tau = tension(index(j));
        const auto dd = tendon_direction_derivatives(design, i, config.s[i], j);
        b.D.col(0) += point_force(link.c(j), tau * dd.dv_hat);
        b.F.col(index(j)) += point_force(link.c(j), js[i].v_hat[index(j)]);
      }
      b.D.col(0) -= coad_c * coadjoint_small(design.child_surface(i).twist_at(config.s[i])) *
                    force_only(config.f[i]);
      b.D.rightCols<2>() = -coad_c.rightCols<2>();
    }

    b.h = link_residual(design, config, tension, loads, js, i);
  }
  return blocks;
}

}  // namespace rolljoint
