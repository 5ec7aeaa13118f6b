#include "rolljoint/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rolljoint/errors.hpp"

namespace rolljoint {

namespace {

double link_extent(const LinkDesign& link) {
  std::vector<Vec2> pts(link.parent_entry.begin(), link.parent_entry.end());
  pts.insert(pts.end(), link.child_entry.begin(), link.child_entry.end());
  for (const auto* surf : {&link.parent_surface, &link.child_surface}) {
    if (*surf) {
      const Interval d = (*surf)->domain();
      for (double s : {d.lo, d.mid(), d.hi}) pts.push_back((*surf)->frame_at(s).translation());
    }
  }
  double extent = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) extent = std::max(extent, (pts[a] - pts[b]).norm());
  return extent;
}

}  // namespace

MechanismDesign::MechanismDesign(std::vector<LinkDesign> links, Pose2 base_pose)
    : links_(std::move(links)), base_pose_(base_pose) {
  double sum = 0.0;
  for (const auto& l : links_) sum += link_extent(l);
  if (!links_.empty() && sum > 0.0) characteristic_length_ = sum / static_cast<double>(links_.size());
}

const ContactSurface& MechanismDesign::child_surface(std::size_t joint) const {
  const auto& surf = links_.at(joint).child_surface;
  if (!surf) throw DomainError("link " + std::to_string(joint) + " has no child surface");
  return *surf;
}

const ContactSurface& MechanismDesign::parent_surface(std::size_t joint) const {
  const auto& surf = links_.at(joint + 1).parent_surface;
  if (!surf) throw DomainError("link " + std::to_string(joint + 1) + " has no parent surface");
  return *surf;
}

Interval MechanismDesign::joint_domain(std::size_t joint) const {
  const Interval a = child_surface(joint).domain();
  const Interval b = parent_surface(joint).domain();
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Pose2 MechanismDesign::relative_pose(std::size_t joint, double s) const {
  return child_surface(joint).frame_at(s) * inverse(parent_surface(joint).frame_at(s));
}

MechanismDesign MechanismDesign::with_base_pose(const Pose2& base) const {
  MechanismDesign copy = *this;
  copy.base_pose_ = base;
  return copy;
}

std::vector<Pose2> forward_poses(const MechanismDesign& design, std::span<const double> s) {
  if (s.size() != design.joint_count()) throw DomainError("expected one contact parameter per joint");
  std::vector<Pose2> poses;
  poses.reserve(design.link_count());
  poses.push_back(design.base_pose());
  for (std::size_t k = 0; k < s.size(); ++k) poses.push_back(poses.back() * design.relative_pose(k, s[k]));
  return poses;
}

Configuration make_configuration(const MechanismDesign& design, std::vector<double> s,
                                 std::vector<Vec2> f) {
  if (f.size() != s.size()) throw DomainError("expected one contact force per joint");
  Configuration config;
  config.poses = forward_poses(design, s);
  config.s = std::move(s);
  config.f = std::move(f);
  return config;
}

Configuration initial_configuration(const MechanismDesign& design) {
  std::vector<double> s(design.joint_count());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = design.joint_domain(k).mid();
  return make_configuration(design, std::move(s), std::vector<Vec2>(s.size(), Vec2::Zero()));
}

TendonSegment tendon_segment(const MechanismDesign& design, std::size_t joint, double s, Side side) {
  const Pose2 X = design.relative_pose(joint, s);
  const LinkDesign& lower = design.link(joint);
  const LinkDesign& upper = design.link(joint + 1);
  return {X.apply(upper.p(side)) - lower.c(side), inverse(X).apply(lower.c(side)) - upper.p(side)};
}

TendonPair in_link_tendon_lengths(const MechanismDesign& design) {
  TendonPair l = TendonPair::Zero();
  for (const auto& link : design.links())
    for (Side j : kSides) l(index(j)) += (link.c(j) - link.p(j)).norm();
  return l;
}

TendonPair tendon_lengths(const MechanismDesign& design, std::span<const double> s) {
  if (s.size() != design.joint_count()) throw DomainError("expected one contact parameter per joint");
  TendonPair l = in_link_tendon_lengths(design);
  for (std::size_t k = 0; k < s.size(); ++k)
    for (Side j : kSides) l(index(j)) += tendon_segment(design, k, s[k], j).v.norm();
  return l;
}

TendonPair tendon_lengths_from_poses(const MechanismDesign& design, std::span<const Pose2> poses) {
  if (poses.size() != design.link_count()) throw DomainError("expected one pose per link");
  TendonPair l = in_link_tendon_lengths(design);
  for (std::size_t k = 0; k + 1 < poses.size(); ++k)
    for (Side j : kSides)
      l(index(j)) += (poses[k + 1].apply(design.link(k + 1).p(j)) - poses[k].apply(design.link(k).c(j))).norm();
  return l;
}

MechanismDesign make_uniform_chain(std::size_t link_count, const UniformChainParams& params,
                                   const Pose2& base_pose) {
  const double half = 0.5 * params.link_height;
  const double r = params.radius;
  const Interval dom{-params.domain_half_width, params.domain_half_width};
  std::vector<LinkDesign> links(link_count);
  for (std::size_t i = 0; i < link_count; ++i) {
    LinkDesign& l = links[i];
    l.name = "link" + std::to_string(i + 1);
    if (i > 0)
      l.parent_surface = ContactSurface::circular_arc({Vec2(0.0, -half + r), r, -0.5 * std::numbers::pi, 1}, dom);
    if (i + 1 < link_count)
      l.child_surface = ContactSurface::circular_arc({Vec2(0.0, half - r), r, 0.5 * std::numbers::pi, -1}, dom);
    const double y = half - params.entry_inset;
    l.parent_entry = {Vec2(-params.tendon_offset, -y), Vec2(params.tendon_offset, -y)};
    l.child_entry = {Vec2(-params.tendon_offset, y), Vec2(params.tendon_offset, y)};
  }
  return MechanismDesign(std::move(links), base_pose);
}

std::vector<std::string> validate(const MechanismDesign& design) {
  std::vector<std::string> issues;
  const std::size_t n = design.link_count();
  if (n < 2) {
    issues.push_back("mechanism needs at least 2 links, got " + std::to_string(n));
    return issues;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const LinkDesign& link = design.link(i);
    const std::string who = "link " + std::to_string(i + 1) + (link.name.empty() ? "" : " (" + link.name + ")");
    const bool want_parent = i > 0;
    const bool want_child = i + 1 < n;
    if (link.parent_surface.has_value() != want_parent)
      issues.push_back(who + (want_parent ? ": missing parent surface" : ": base link must not have a parent surface"));
    if (link.child_surface.has_value() != want_child)
      issues.push_back(who + (want_child ? ": missing child surface" : ": tip link must not have a child surface"));
    for (const auto* pts : {&link.parent_entry, &link.child_entry})
      for (const Vec2& p : *pts)
        if (!p.allFinite()) issues.push_back(who + ": tendon entry point is not finite");
  }
  if (!issues.empty()) return issues;

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Interval a = design.child_surface(k).domain();
    const Interval b = design.parent_surface(k).domain();
    const double tol = 1e-9 * std::max(a.width(), b.width());
    std::ostringstream os;
    if (std::abs(a.width() - b.width()) > tol) {
      os << "joint " << k + 1 << ": mating surface domains differ in width (" << a.width() << " vs "
         << b.width() << ")";
      issues.push_back(os.str());
    } else if (std::abs(a.lo - b.lo) > tol) {
      os << "joint " << k + 1 << ": mating surface domains are offset ([" << a.lo << ", " << a.hi
         << "] vs [" << b.lo << ", " << b.hi << "])";
      issues.push_back(os.str());
    }
  }
  return issues;
}

}  // namespace rolljoint
