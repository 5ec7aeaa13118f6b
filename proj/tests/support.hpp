#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rolljoint/cli/io.hpp"
#include "rolljoint/mechanism.hpp"

namespace rolljoint::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(ROLLJOINT_SOURCE_DIR) / rel;
}

inline MechanismDesign load(const std::string& name) { return cli::load_design(source_path("designs/" + name)); }
inline MechanismDesign paper5() { return load("paper5.json"); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Pose2 random_pose(std::mt19937_64& rng, double extent = 50.0) {
  return Pose2(uniform(rng, -3.14159, 3.14159), Vec2(uniform(rng, -extent, extent), uniform(rng, -extent, extent)));
}

inline Twist2 random_twist(std::mt19937_64& rng) {
  return {uniform(rng, -1, 1), Vec2(uniform(rng, -1, 1), uniform(rng, -1, 1))};
}

/// Contact parameters drawn from the inner 80% of every joint domain.
inline std::vector<double> random_s(const MechanismDesign& d, std::mt19937_64& rng, double fraction = 0.8) {
  std::vector<double> s;
  for (std::size_t k = 0; k < d.joint_count(); ++k) {
    const Interval dom = d.joint_domain(k);
    const double half = 0.5 * fraction * dom.width();
    s.push_back(uniform(rng, dom.mid() - half, dom.mid() + half));
  }
  return s;
}

/// Straight segments: every link is a box of height h whose contact faces are flat.
inline MechanismDesign flat_chain(std::size_t n, double h = 20.0, double offset = 6.0) {
  std::vector<LinkDesign> links(n);
  const Interval dom{-10.0, 10.0};
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) links[i].parent_surface = ContactSurface::curvature_profile({Pose2(0.0, Vec2(0, -h / 2)), {0.0}}, dom);
    if (i + 1 < n) links[i].child_surface = ContactSurface::curvature_profile({Pose2(0.0, Vec2(0, h / 2)), {0.0}}, dom);
    links[i].parent_entry = {Vec2(-offset, -h / 2 + 1), Vec2(offset, -h / 2 + 1)};
    links[i].child_entry = {Vec2(-offset, h / 2 - 1), Vec2(offset, h / 2 - 1)};
  }
  return MechanismDesign(std::move(links), Pose2::identity());
}

inline double max_pose_gap(const std::vector<Pose2>& a, const std::vector<Pose2>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    g = std::max(g, (a[i].translation() - b[i].translation()).norm());
    g = std::max(g, std::abs(a[i].angle() - b[i].angle()));
  }
  return g;
}

}  // namespace rolljoint::testing
