#include "rolljoint/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rolljoint/oracle.hpp"
#include "rolljoint/solver_displacement.hpp"
#include "rolljoint/statics.hpp"

namespace rolljoint::cli {
namespace {

using Clock = std::chrono::steady_clock;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Pose2 random_pose(std::mt19937_64& rng) {
  return Pose2(uniform(rng, -std::numbers::pi, std::numbers::pi), Vec2(uniform(rng, -50, 50), uniform(rng, -50, 50)));
}

Twist2 random_twist(std::mt19937_64& rng) {
  return {uniform(rng, -1, 1), Vec2(uniform(rng, -1, 1), uniform(rng, -1, 1))};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

template <class F>
CheckResult timed(std::string name, F&& body) {
  const auto t0 = Clock::now();
  CheckResult r{std::move(name), false, "", 0.0};
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// Ratio test: an O(h^2) error must drop ~4x when h halves, unless it is already at roundoff level.
bool second_order(double e_h, double e_half, double floor) {
  if (e_half <= floor) return true;
  const double ratio = e_h / e_half;
  return ratio > 3.0 && ratio < 5.0;
}

std::vector<const ContactSurface*> surfaces(const MechanismDesign& design) {
  std::vector<const ContactSurface*> out;
  for (const auto& l : design.links()) {
    if (l.parent_surface) out.push_back(&*l.parent_surface);
    if (l.child_surface) out.push_back(&*l.child_surface);
  }
  return out;
}

SolverOptions tight() {
  SolverOptions o;
  o.tol_residual = 1e-11;
  return o;
}

}  // namespace

std::vector<VerifyScenario> standard_scenarios(const MechanismDesign& design) {
  const std::size_t n = design.link_count();
  const std::size_t tip = n - 1;
  const std::size_t mid = n / 2;
  const LinkDesign& t = design.link(tip);
  const Vec2 attach = 0.5 * (t.c(Side::left) + t.c(Side::right));
  const auto straight = initial_configuration(design).poses;
  const Vec2 tip_home = straight[tip].apply(attach);

  auto workspace = [](double m, Vec2 f, Vec2 at, std::size_t link) {
    return ExternalLoad{ConstantWorkspace{Wrench2{m, f}, at}, link};
  };
  auto spring = [](double k, Vec2 anchor, std::size_t link) { return ExternalLoad{LinearSpring{k, anchor}, link}; };
  auto body = [](double m, Vec2 f, std::size_t link) { return ExternalLoad{ConstantBody{Wrench2{m, f}}, link}; };

  std::vector<VerifyScenario> out;
  out.push_back({"unloaded (1, 1)", {1.0, 1.0}, {}, true});
  out.push_back({"unloaded (1.5, 1)", {1.5, 1.0}, {}, true});
  out.push_back({"unloaded (1, 1.5)", {1.0, 1.5}, {}, true});
  out.push_back({"unloaded (2, 1)", {2.0, 1.0}, {}, true});
  out.push_back({"tip pull", {2.0, 1.0}, {workspace(0.0, {0.3, 0.0}, attach, tip)}, true});
  out.push_back({"tip force and moment", {1.0, 2.0}, {workspace(0.5, {0.0, -0.1}, attach, tip)}, true});
  out.push_back({"tip spring", {1.5, 1.0}, {spring(0.02, tip_home + Vec2(10.0, 0.0), tip)}, true});
  out.push_back({"body load", {1.5, 1.0}, {body(0.0, {0.2, 0.0}, mid)}, false});
  out.push_back({"mixed loads",
                 {1.0, 1.5},
                 {workspace(0.0, {0.2, -0.1}, Vec2::Zero(), mid), spring(0.01, tip_home + Vec2(-8.0, 0.0), tip),
                  body(0.1, {0.0, -0.1}, tip)},
                 false});
  VerifyScenario weight{"distributed weight", {2.0, 2.0}, {}, true};
  for (std::size_t i = 1; i < n; ++i) weight.loads.push_back(workspace(0.0, {0.0, -0.1}, Vec2::Zero(), i));
  out.push_back(std::move(weight));
  return out;
}

double linearization_error(const MechanismDesign& design, const Configuration& config, const TendonPair& tension,
                           std::span<const ExternalLoad> loads, const Eigen::VectorXd& direction,
                           const TendonPair& dtau, double eps) {
  const std::size_t m = design.joint_count();
  const auto blocks = assemble_blocks(design, config, tension, loads);
  const auto h0 = residual(design, config, tension, loads);

  std::vector<double> s = config.s;
  std::vector<Vec2> f = config.f;
  for (std::size_t k = 0; k < m; ++k) {
    s[k] += eps * direction(3 * k);
    f[k] += eps * direction.segment<2>(3 * k + 1);
  }
  const auto h1 = residual(design, make_configuration(design, s, f), tension + eps * dtau, loads);

  double err = 0.0;
  Vec3 dxi = Vec3::Zero();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const LinkBlocks& L = blocks[b];
    const Vec3 eta_prev = direction.segment<3>(3 * b);
    dxi = -L.A * dxi - L.B * eta_prev;
    Vec3 dh = L.C * dxi + L.E * eta_prev + L.F * dtau;
    if (b + 1 < blocks.size()) dh += L.D * direction.segment<3>(3 * (b + 1));
    err = std::max(err, (h1[b] - h0[b] - eps * dh).norm());
  }
  return err;
}

Eigen::Matrix2d jacobian_by_resolve(const MechanismDesign& design, const Configuration& config,
                                    const TendonPair& tension, std::span<const ExternalLoad> loads,
                                    double rel_step) {
  Eigen::Matrix2d J;
  for (int k = 0; k < 2; ++k) {
    TendonPair d = TendonPair::Zero();
    d[k] = rel_step * tension[k];
    const auto plus = solve_tension(design, tension + d, loads, config, tight());
    const auto minus = solve_tension(design, tension - d, loads, config, tight());
    J.col(k) = (tendon_lengths(design, plus.config) - tendon_lengths(design, minus.config)) / (2.0 * d[k]);
  }
  return J;
}

PoseGap pose_gap(std::span<const Pose2> a, std::span<const Pose2> b) {
  PoseGap g;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    g.position = std::max(g.position, (a[i].translation() - b[i].translation()).norm());
    g.angle = std::max(g.angle, std::abs(a[i].angle() - b[i].angle()));
  }
  return g;
}

CheckResult check_geometry_identities(std::mt19937_64& rng, int samples) {
  return timed("geometry identities", [&](CheckResult& r) {
    double hom = 0.0, dual = 0.0, conj = 0.0, coad = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Pose2 T1 = random_pose(rng), T2 = random_pose(rng);
      const Twist2 xi = random_twist(rng);
      const Vec3 F(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
      hom = std::max(hom, (adjoint(T1 * T2) - adjoint(T1) * adjoint(T2)).norm() / (1.0 + adjoint(T1 * T2).norm()));
      const Vec3 x = xi.vector();
      dual = std::max(dual, std::abs(F.dot(x) - (coadjoint(T1) * F).dot(adjoint(T1) * x)) / (1.0 + adjoint(T1).norm()));
      const Mat3 lhs = hat(Twist2::from_vector(adjoint(T1) * x));
      const Mat3 rhs = T1.matrix() * hat(xi) * inverse(T1).matrix();
      conj = std::max(conj, (lhs - rhs).norm() / (1.0 + rhs.norm()));
      const double h = 1e-6;
      const Mat3 fd = (coadjoint(T1 * exp(Twist2::from_vector(h * x))) -
                       coadjoint(T1 * exp(Twist2::from_vector(-h * x)))) / (2.0 * h);
      coad = std::max(coad, (fd - coadjoint(T1) * coadjoint_small(xi)).norm() / (1.0 + fd.norm()));
    }
    r.pass = hom < 1e-12 && dual < 1e-12 && conj < 1e-12 && coad < 1e-7;
    r.detail = "Ad homomorphism " + fmt(hom) + ", duality " + fmt(dual) + ", conjugation " + fmt(conj) +
               ", ad* rate " + fmt(coad);
  });
}

CheckResult check_surface_odes(const MechanismDesign& design) {
  return timed("surface ODE", [&](CheckResult& r) {
    bool ok = true;
    double worst_frame = 0.0, worst_speed = 0.0;
    for (const ContactSurface* surf : surfaces(design)) {
      const Interval d = surf->domain();
      const double h = 0.02 * d.width();
      for (int i = 0; i <= 10; ++i) {
        const double s = d.lo + h + (d.width() - 2 * h) * i / 10.0;
        auto frame_err = [&](double step) {
          const Mat3 fd = (surf->frame_at(s + step).matrix() - surf->frame_at(s - step).matrix()) / (2 * step);
          return (fd - surf->frame_at(s).matrix() * hat(surf->twist_at(s))).norm();
        };
        const double e1 = frame_err(h), e2 = frame_err(0.5 * h);
        ok = ok && second_order(e1, e2, 1e-8);
        worst_frame = std::max(worst_frame, e2);
        const double step = 1e-5 * d.width();
        const Vec2 dp = (surf->frame_at(s + step).translation() - surf->frame_at(s - step).translation()) / (2 * step);
        worst_speed = std::max(worst_speed, std::abs(dp.norm() - 1.0));
      }
    }
    r.pass = ok && worst_speed < 1e-6;
    r.detail = "frame rate error " + fmt(worst_frame) + ", speed error " + fmt(worst_speed);
  });
}

CheckResult check_load_derivatives(std::mt19937_64& rng, int samples) {
  return timed("load derivatives", [&](CheckResult& r) {
    double worst = 0.0;
    for (int variant = 0; variant < 3; ++variant) {
      for (int i = 0; i < samples; ++i) {
        const Wrench2 w{uniform(rng, -2, 2), Vec2(uniform(rng, -2, 2), uniform(rng, -2, 2))};
        const Vec2 p(uniform(rng, -20, 20), uniform(rng, -20, 20));
        LoadModel model;
        if (variant == 0) model = ConstantBody{w};
        if (variant == 1) model = ConstantWorkspace{w, p};
        if (variant == 2) model = LinearSpring{uniform(rng, 0.01, 1.0), p};
        const Pose2 T = random_pose(rng);
        Mat3 fd;
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
          const Twist2 e = Twist2::from_vector(h * Vec3::Unit(k));
          const Twist2 me = Twist2::from_vector(-h * Vec3::Unit(k));
          fd.col(k) = (evaluate(model, T * exp(e)).vector() - evaluate(model, T * exp(me)).vector()) / (2 * h);
        }
        const double scale = std::max(fd.norm(), 1e-8);
        worst = std::max(worst, (derivative(model, T) - fd).norm() / scale);
      }
    }
    r.pass = worst < 1e-5;
    r.detail = "max relative error " + fmt(worst);
  });
}

CheckResult check_direction_derivatives(const MechanismDesign& design, std::mt19937_64& rng) {
  return timed("tendon direction derivatives", [&](CheckResult& r) {
    double worst = 0.0;
    for (std::size_t k = 0; k < design.joint_count(); ++k) {
      const Interval d = design.joint_domain(k);
      for (int i = 0; i < 10; ++i) {
        const double s = uniform(rng, d.lo + 0.05 * d.width(), d.hi - 0.05 * d.width());
        for (Side j : kSides) {
          const double h = 1e-6;
          const auto a = tendon_segment(design, k, s + h, j), b = tendon_segment(design, k, s - h, j);
          const Vec2 dv = (a.v.normalized() - b.v.normalized()) / (2 * h);
          const Vec2 dw = (a.w.normalized() - b.w.normalized()) / (2 * h);
          const Vec2 rate = (a.v - b.v) / (2 * h);
          const auto an = tendon_direction_derivatives(design, k, s, j);
          worst = std::max({worst, (an.dv_hat - dv).norm() / std::max(dv.norm(), 1e-3),
                            (an.dw_hat - dw).norm() / std::max(dw.norm(), 1e-3),
                            (tendon_segment_rate(design, k, s, j) - rate).norm() / std::max(rate.norm(), 1e-3)});
        }
      }
    }
    r.pass = worst < 1e-6;
    r.detail = "max relative error " + fmt(worst);
  });
}

CheckResult check_block_linearization(const MechanismDesign& design, std::span<const VerifyScenario> scenarios,
                                      std::mt19937_64& rng) {
  return timed("block linearization", [&](CheckResult& r) {
    bool ok = true;
    double worst_ratio = 4.0;
    int tested = 0;
    const std::size_t m = design.joint_count();
    for (const auto& sc : scenarios) {
      const auto sol = solve_tension(design, sc.tension, sc.loads);
      std::vector<double> s = sol.config.s;
      std::vector<Vec2> f = sol.config.f;
      for (std::size_t k = 0; k < m; ++k) {
        const Interval d = design.joint_domain(k);
        s[k] = d.clamp(s[k] + uniform(rng, -0.05, 0.05) * d.width());
        f[k] += Vec2(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
      }
      const auto at = make_configuration(design, s, f);
      Eigen::VectorXd dir(3 * m);
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = uniform(rng, -1, 1);
      const TendonPair dtau(uniform(rng, -1, 1), uniform(rng, -1, 1));
      const double e1 = linearization_error(design, at, sc.tension, sc.loads, dir, dtau, 1e-3);
      const double e2 = linearization_error(design, at, sc.tension, sc.loads, dir, dtau, 5e-4);
      if (!second_order(e1, e2, 1e-10)) ok = false;
      if (e2 > 1e-10) {
        const double ratio = e1 / e2;
        if (std::abs(ratio - 4.0) > std::abs(worst_ratio - 4.0)) worst_ratio = ratio;
      }
      ++tested;
    }
    r.pass = ok && tested > 0;
    r.detail = std::to_string(tested) + " points, worst error ratio " + fmt(worst_ratio) + " (expect 4)";
  });
}

CheckResult check_dense_oracle(const MechanismDesign& design, std::span<const VerifyScenario> scenarios) {
  return timed("dense oracle", [&](CheckResult& r) {
    double ds = 0.0;
    PoseGap gap;
    oracle::DenseOptions dopt;
    dopt.tol_residual = 1e-11;
    for (const auto& sc : scenarios) {
      const auto rec = solve_tension(design, sc.tension, sc.loads, std::nullopt, tight());
      const auto dense = oracle::dense_solve(design, sc.tension, sc.loads, std::nullopt, dopt);
      for (std::size_t k = 0; k < rec.config.s.size(); ++k)
        ds = std::max(ds, std::abs(rec.config.s[k] - dense.config.s[k]));
      const auto g = pose_gap(rec.config.poses, dense.config.poses);
      gap.position = std::max(gap.position, g.position);
      gap.angle = std::max(gap.angle, g.angle);
    }
    r.pass = ds < 1e-8 && gap.position < 1e-6 && gap.angle < 1e-6;
    r.detail = std::to_string(scenarios.size()) + " scenarios, max |ds| " + fmt(ds) + " mm, pose " +
               fmt(gap.position) + " mm / " + fmt(gap.angle) + " rad";
  });
}

CheckResult check_energy(const MechanismDesign& design, std::span<const VerifyScenario> scenarios) {
  return timed("energy stationarity", [&](CheckResult& r) {
    double worst = 0.0, worst_min = 0.0;
    int tested = 0;
    for (const auto& sc : scenarios) {
      if (!sc.conservative) continue;
      const auto sol = solve_tension(design, sc.tension, sc.loads, std::nullopt, tight());
      const auto g = oracle::energy_gradient(design, sol.config.s, sc.tension, sc.loads);
      double gi = 0.0;
      for (double x : g) gi = std::max(gi, std::abs(x));
      worst = std::max(worst, gi / (1e-6 * sc.tension.sum()));
      std::vector<double> start = sol.config.s;
      for (std::size_t k = 0; k < start.size(); ++k) start[k] = design.joint_domain(k).clamp(start[k] + 0.3);
      const auto smin = oracle::energy_minimize(design, sc.tension, sc.loads, start);
      for (std::size_t k = 0; k < smin.size(); ++k) worst_min = std::max(worst_min, std::abs(smin[k] - sol.config.s[k]));
      ++tested;
    }
    r.pass = tested > 0 && worst < 1.0 && worst_min < 1e-3;
    r.detail = std::to_string(tested) + " scenarios, |grad E| / (1e-6 sum tau) " + fmt(worst) +
               ", minimizer gap " + fmt(worst_min) + " mm";
  });
}

CheckResult check_jacobian(const MechanismDesign& design, std::span<const VerifyScenario> scenarios) {
  return timed("tendon Jacobian", [&](CheckResult& r) {
    double worst = 0.0, null = 0.0;
    for (const auto& sc : scenarios) {
      const auto sol = solve_tension(design, sc.tension, sc.loads, std::nullopt, tight());
      const Eigen::Matrix2d J = tendon_jacobian(design, sol.config, sc.tension, sc.loads);
      const Eigen::Matrix2d fd = jacobian_by_resolve(design, sol.config, sc.tension, sc.loads);
      worst = std::max(worst, (J - fd).norm() / fd.norm());
      if (sc.unloaded()) null = std::max(null, (J * sc.tension).norm() / (J.norm() * sc.tension.norm()));
    }
    r.pass = worst < 1e-4 && null <= 1e-8;
    r.detail = "max relative error " + fmt(worst) + ", unloaded |J tau| / |J||tau| " + fmt(null);
  });
}

std::vector<CheckResult> run_verify(const MechanismDesign& design, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto scenarios = standard_scenarios(design);
  std::vector<CheckResult> out;
  out.push_back(check_geometry_identities(rng, 1000));
  out.push_back(check_surface_odes(design));
  out.push_back(check_load_derivatives(rng, 100));
  out.push_back(check_direction_derivatives(design, rng));
  out.push_back(check_block_linearization(design, scenarios, rng));
  out.push_back(check_dense_oracle(design, scenarios));
  out.push_back(check_energy(design, scenarios));
  out.push_back(check_jacobian(design, scenarios));
  return out;
}

}  // namespace rolljoint::cli
