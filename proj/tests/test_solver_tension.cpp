#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rolljoint/errors.hpp"
#include "rolljoint/oracle.hpp"
#include "rolljoint/solver_tension.hpp"
#include "support.hpp"

using namespace rolljoint;
using namespace rolljoint::testing;

namespace {

const std::vector<ExternalLoad> kNoLoads;

std::vector<ExternalLoad> tip_pull(const MechanismDesign& d, double fx) {
  return {{ConstantWorkspace{{0.0, Vec2(fx, 0.0)}, Vec2(0, 10)}, d.link_count() - 1}};
}

Eigen::VectorXd pack_step(const NewtonStep& step) {
  Eigen::VectorXd x(3 * step.ds.size());
  for (std::size_t k = 0; k < step.ds.size(); ++k) {
    x(3 * k) = step.ds[k];
    x.segment<2>(3 * k + 1) = step.df[k];
  }
  return x;
}

Eigen::VectorXd dense_step(const MechanismDesign& d, const Configuration& c, const TendonPair& tau,
                           std::span<const ExternalLoad> loads) {
  const oracle::DenseSystem sys{d, tau, loads};
  const Eigen::VectorXd x = sys.pack(c);
  return -sys.jacobian(x, {.step_s = 1e-5, .step_f = 1e-5}).lu().solve(sys.residual(x));
}

}  // namespace

TEST(SolveTension, EqualTensionsGiveStraightStack) {
  const MechanismDesign d = paper5();
  const auto sol = solve_tension(d, TendonPair(1, 1), kNoLoads);
  EXPECT_TRUE(sol.report.converged);
  for (std::size_t k = 0; k < d.joint_count(); ++k) {
    EXPECT_NEAR(sol.config.s[k], d.joint_domain(k).mid(), 1e-9);
    EXPECT_NEAR(sol.config.f[k].x(), 0.0, 1e-9);
    EXPECT_NEAR(sol.config.f[k].y(), 2.0, 1e-9);
  }
  for (const Pose2& T : sol.config.poses) {
    EXPECT_NEAR(T.angle(), 0.0, 1e-10);
    EXPECT_NEAR(T.translation().x(), 0.0, 1e-9);
  }
}

TEST(SolveTension, UnevenTensionsBendTowardTheTighterTendon) {
  const MechanismDesign d = paper5();
  const auto left = solve_tension(d, TendonPair(3, 1), kNoLoads);
  const auto right = solve_tension(d, TendonPair(1, 3), kNoLoads);
  EXPECT_GT(left.config.poses.back().angle(), 0.1);
  EXPECT_LT(left.config.poses.back().translation().x(), -1.0);
  // mirror image
  EXPECT_NEAR(left.config.poses.back().angle(), -right.config.poses.back().angle(), 1e-8);
  EXPECT_NEAR(left.config.poses.back().translation().x(), -right.config.poses.back().translation().x(), 1e-8);
}

TEST(SolveTension, DoubledTensionsKeepTheConfiguration) {
  const MechanismDesign d = paper5();
  for (const TendonPair& tau : {TendonPair(3, 1), TendonPair(1, 3)}) {
    const auto a = solve_tension(d, tau, kNoLoads);
    const auto b = solve_tension(d, 2 * tau, kNoLoads);
    EXPECT_LT(max_pose_gap(a.config.poses, b.config.poses), 1e-10);
    for (std::size_t k = 0; k < a.config.f.size(); ++k)
      EXPECT_LT((b.config.f[k] - 2 * a.config.f[k]).norm(), 1e-8 * 2 * a.config.f[k].norm());
  }
}

TEST(SolveTension, RatioInvariance) {
  const MechanismDesign d = paper5();
  const TendonPair tau(2, 1);
  const auto base = solve_tension(d, tau, kNoLoads);
  for (double lambda : {0.5, 2.0, 10.0}) {
    const auto sol = solve_tension(d, lambda * tau, kNoLoads);
    for (std::size_t k = 0; k < d.joint_count(); ++k) {
      EXPECT_NEAR(sol.config.s[k], base.config.s[k], 1e-8);
      EXPECT_LT((sol.config.f[k] - lambda * base.config.f[k]).norm(), 1e-8 * lambda * base.config.f[k].norm());
    }
    EXPECT_LT(max_pose_gap(sol.config.poses, base.config.poses), 1e-8);
  }
}

TEST(SolveTension, LoadScalingCovariance) {
  const MechanismDesign d = paper5();
  const TendonPair tau(6, 3);
  const std::vector<ExternalLoad> loads{{ConstantWorkspace{{0.0, Vec2(1.0, 0.0)}, Vec2(0, 10)}, 4},
                                        {LinearSpring{0.01, Vec2(20, 80)}, 3},
                                        {ConstantBody{{0.2, Vec2(0.1, 0)}}, 2}};
  const auto base = solve_tension(d, tau, loads);
  for (double lambda : {0.5, 3.0}) {
    std::vector<ExternalLoad> scaled_loads;
    for (const auto& l : loads) scaled_loads.push_back(scaled(l, lambda));
    const auto sol = solve_tension(d, lambda * tau, scaled_loads);
    for (std::size_t k = 0; k < d.joint_count(); ++k) {
      EXPECT_NEAR(sol.config.s[k], base.config.s[k], 1e-8);
      EXPECT_LT((sol.config.f[k] - lambda * base.config.f[k]).norm(), 1e-8 * lambda * base.config.f[k].norm());
    }
  }
}

TEST(SolveTension, PullSweepMovesTipRight) {
  const MechanismDesign d = paper5();
  double last_x = -1e9;
  std::optional<Configuration> warm;
  for (double fx = 0.0; fx <= 1.5 + 1e-12; fx += 0.25) {
    const auto sol = solve_tension(d, TendonPair(6, 3), tip_pull(d, fx), warm);
    EXPECT_LE(sol.report.iterations, 50);
    EXPECT_LE(sol.report.final_residual_norm, 1e-9);
    const double x = sol.config.poses.back().translation().x();
    EXPECT_GT(x, last_x) << fx;
    last_x = x;
    warm = sol.config;
  }
}

TEST(SolveTension, FixedPoint) {
  const MechanismDesign d = paper5();
  const auto loads = tip_pull(d, 1.0);
  const auto sol = solve_tension(d, TendonPair(6, 3), loads);
  const auto again = solve_tension(d, TendonPair(6, 3), loads, sol.config);
  EXPECT_LE(again.report.iterations, 1);
  EXPECT_LT(max_pose_gap(sol.config.poses, again.config.poses), 1e-9);
}

TEST(SolveTension, QuadraticTail) {
  const MechanismDesign d = paper5();
  const auto sol = solve_tension(d, TendonPair(6, 3), tip_pull(d, 1.0), std::nullopt, {.tol_residual = 1e-13});
  const auto& r = sol.report.residual_history;
  int checked = 0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] >= 1e-3 || r[i + 1] < 1e-11) continue;
    const double slope = std::log(r[i + 1] / r[i]) / std::log(r[i] / r[i - 1]);
    EXPECT_GE(slope, 1.8) << "iteration " << i;
    ++checked;
  }
  EXPECT_GE(checked, 1);
}

TEST(NewtonStep, ZeroAtEquilibrium) {
  const MechanismDesign d = paper5();
  const auto loads = tip_pull(d, 0.5);
  const auto sol = solve_tension(d, TendonPair(6, 3), loads, std::nullopt, {.tol_residual = 1e-13});
  EXPECT_LT(pack_step(newton_step(d, sol.config, TendonPair(6, 3), loads)).norm(), 1e-11);
}

TEST(NewtonStep, MatchesDenseNewtonStep) {
  std::mt19937_64 rng(151);
  for (const MechanismDesign& d : {load("two_link.json"), load("three_link.json"), paper5()}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto s = random_s(d, rng, 0.5);
      std::vector<Vec2> f;
      for (std::size_t k = 0; k < s.size(); ++k) f.emplace_back(uniform(rng, -1, 1), uniform(rng, 1, 4));
      const Configuration c = make_configuration(d, s, f);
      const TendonPair tau(uniform(rng, 0.5, 3), uniform(rng, 0.5, 3));
      const auto loads = trial % 2 ? tip_pull(d, 0.7) : kNoLoads;
      const Eigen::VectorXd rec = pack_step(newton_step(d, c, tau, loads));
      const Eigen::VectorXd dense = dense_step(d, c, tau, loads);
      EXPECT_LT((rec - dense).norm(), 1e-8 * dense.norm()) << d.link_count() << " links, trial " << trial;
    }
  }
}

TEST(NewtonStep, CountsInversionsAndBoundarySolves) {
  for (std::size_t n : {2u, 3u, 5u, 12u}) {
    const MechanismDesign d = make_uniform_chain(n);
    StepCounters counters;
    const Configuration start = balance_contact_forces(d, initial_configuration(d), TendonPair(2, 1), kNoLoads);
    newton_step(d, start, TendonPair(2, 1), kNoLoads, &counters);
    EXPECT_EQ(counters.block_inversions, static_cast<long>(n - 2));
    EXPECT_EQ(counters.boundary_solves, 1);
    const auto sol = solve_tension(d, TendonPair(1.2, 1), kNoLoads);
    EXPECT_EQ(sol.report.block_inversions, sol.report.iterations * static_cast<long>(n - 2));
    EXPECT_EQ(sol.report.boundary_solves, sol.report.iterations);
  }
}

TEST(BlockRecursion, SingularInteriorBlock) {
  std::vector<LinkBlocks> blocks(2);
  blocks[0].D = Mat3::Zero();
  EXPECT_THROW(BlockRecursion{blocks}, SingularBlock);
}

TEST(BlockRecursion, SolvesIdentitySystem) {
  std::vector<LinkBlocks> blocks(3);
  for (auto& b : blocks) b.E = Mat3::Identity();
  const BlockRecursion rec(blocks);
  EXPECT_EQ(rec.block_inversions(), 2);
  std::vector<BlockRecursion::Rhs> eps(3, BlockRecursion::Rhs::Zero(6, 1));
  const auto res = rec.solve(eps);
  ASSERT_EQ(res.deta.size(), 3u);
  for (const auto& d : res.deta) EXPECT_TRUE(d.isZero(0.0));
}

TEST(SolveTension, ContactRolloff) {
  const MechanismDesign d = load("two_link.json");
  const std::vector<ExternalLoad> twist{{ConstantBody{{40.0, Vec2::Zero()}}, 1}};
  try {
    solve_tension(d, TendonPair(1, 1), twist);
    FAIL() << "expected ContactRolloff";
  } catch (const ContactRolloff& e) {
    ASSERT_EQ(e.report.clamped_joints.size(), 1u);
    EXPECT_EQ(e.report.clamped_joints[0], 0u);
    const Interval dom = d.joint_domain(0);
    EXPECT_TRUE(std::abs(e.last.s[0] - dom.lo) < 1e-6 || std::abs(e.last.s[0] - dom.hi) < 1e-6);
  }
}

TEST(SolveTension, NoConvergenceCarriesReport) {
  const MechanismDesign d = paper5();
  try {
    solve_tension(d, TendonPair(3, 1), kNoLoads, std::nullopt, {.max_iters = 1});
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.report.iterations, 1);
    EXPECT_FALSE(e.report.converged);
    EXPECT_GT(e.report.final_residual_norm, 1e-9);
    EXPECT_EQ(e.last.s.size(), d.joint_count());
  }
}

TEST(SolveTension, RejectsBadInput) {
  const MechanismDesign d = paper5();
  EXPECT_THROW(solve_tension(d, TendonPair(0, 1), kNoLoads), DomainError);
  EXPECT_THROW(solve_tension(d, TendonPair(1, -1), kNoLoads), DomainError);
  EXPECT_THROW(solve_tension(d, TendonPair(1, 1), kNoLoads, std::nullopt, {.tol_residual = 0.0}), DomainError);
  Configuration bad = initial_configuration(d);
  bad.s[0] = 1e3;
  EXPECT_THROW(solve_tension(d, TendonPair(1, 1), kNoLoads, bad), DomainError);
}

TEST(SolveTension, LongUniformChain) {
  const MechanismDesign d = make_uniform_chain(50);
  const auto sol = solve_tension(d, TendonPair(1.05, 1), kNoLoads);
  EXPECT_TRUE(sol.report.converged);
  EXPECT_GT(sol.config.poses.back().angle(), 0.0);
}

TEST(SolveTension, LongLightlyLoadedChain) {
  const MechanismDesign d = make_uniform_chain(50);
  for (double fx : {0.002, 0.02, 0.05}) {
    const std::vector<ExternalLoad> pull{{ConstantWorkspace{{0.0, Vec2(fx, 0)}, Vec2::Zero()}, 49}};
    const auto sol = solve_tension(d, TendonPair(1.1, 1), pull);
    EXPECT_TRUE(sol.report.converged) << fx;
    EXPECT_LT(sol.config.poses.back().angle(), 0.0) << fx;
  }
}
