#include "rolljoint/solver_displacement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rolljoint {

namespace {

bool unloaded(std::span<const ExternalLoad> loads) {
  for (const auto& l : loads) {
    const auto* body = std::get_if<ConstantBody>(&l.model);
    if (!body || body->wrench.m != 0.0 || !body->wrench.f.isZero()) return false;
  }
  return true;
}

constexpr double kLengthRoundoff = 1e-14;

// Gradient with the components that push a floored tension further down removed.
Eigen::Vector2d projected(const Eigen::Vector2d& grad, const TendonPair& tau, double floor) {
  Eigen::Vector2d g = grad;
  for (int i = 0; i < 2; ++i)
    if (tau(i) <= floor && g(i) > 0.0) g(i) = 0.0;
  return g;
}

}  // namespace

TensionResponse tension_response(const MechanismDesign& design, const Configuration& config,
                                 const TendonPair& tension, std::span<const ExternalLoad> loads) {
  const auto blocks = assemble_blocks(design, config, tension, loads);
  const BlockRecursion rec(blocks);
  std::vector<BlockRecursion::Rhs> eps;
  eps.reserve(blocks.size());
  for (const auto& b : blocks) {
    BlockRecursion::Rhs e = BlockRecursion::Rhs::Zero(6, 2);
    e.bottomRows<3>() = -b.F;
    eps.push_back(std::move(e));
  }
  const auto res = rec.solve(eps);

  TensionResponse out;
  out.J.setZero();
  for (std::size_t k = 0; k < res.deta.size(); ++k) {
    out.H.emplace_back(res.deta[k]);
    for (Side j : kSides) {
      const Vec2 v = tendon_segment(design, k, config.s[k], j).v;
      const double rate = v.normalized().dot(tendon_segment_rate(design, k, config.s[k], j));
      out.J.row(index(j)) += rate * res.deta[k].row(0);
    }
  }
  return out;
}

DisplacementSolution solve_displacement(const MechanismDesign& design, const TendonPair& target_lengths,
                                        std::span<const ExternalLoad> loads, const TendonPair& tension_init,
                                        const DisplacementOptions& opts, const std::optional<Configuration>& init) {
  const double floor = opts.tension_floor;
  if (!(floor > 0.0)) throw DomainError("tension floor must be positive");
  if (opts.alpha && !(*opts.alpha > 0.0)) throw DomainError("step size must be positive");
  if (!(tension_init.minCoeff() > floor)) throw DomainError("initial tensions must exceed the tension floor");

  DisplacementReport report;
  TendonPair tau = tension_init;
  auto eq = solve_tension(design, tau, loads, init, opts.inner);
  Configuration config = std::move(eq.config);
  report.equilibrium = std::move(eq.report);

  TendonPair resid = tendon_lengths(design, config) - target_lengths;
  double objective = 0.5 * resid.squaredNorm();
  TensionResponse resp = tension_response(design, config, tau, loads);
  Eigen::Vector2d grad = resp.J.transpose() * resid;
  report.objective_history.push_back(objective);

  double alpha = opts.alpha.value_or(0.0);
  if (!opts.alpha) {
    const double jn = resp.J.squaredNorm();
    alpha = jn > 0.0 ? 1.0 / jn : 1.0;
  }
  const double alpha_min = alpha * 1e-20;

  const auto stationary = [&] {
    const double scale = std::max(1.0, resid.norm() * resp.J.norm());
    return projected(grad, tau, floor).norm() <= opts.grad_tol * scale;
  };

  while (!stationary()) {
    if (report.outer_iterations >= opts.max_outer_iters || alpha < alpha_min) {
      std::ostringstream os;
      os << "displacement actuation did not converge after " << report.outer_iterations
         << " iterations (|g| = " << projected(grad, tau, floor).norm() << ")";
      throw NoConvergence(os.str(), report.equilibrium, config);
    }
    ++report.outer_iterations;

    TendonPair tau_new = (tau - alpha * grad).cwiseMax(floor);
    const TendonPair dtau = tau_new - tau;
    if ((tau_new.array() <= floor).all() && dtau.norm() == 0.0)
      throw TensionFloor("both tendon tensions are pinned at the floor");

    // Predict the configuration change from the impulse response, then correct.
    std::vector<double> s = config.s;
    std::vector<Vec2> f = config.f;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Vec3 dx = resp.H[k] * dtau;
      s[k] = design.joint_domain(k).clamp(s[k] + dx(0));
      f[k] += dx.tail<2>();
    }

    bool accepted = false;
    double bb_alpha = 0.0;
    try {
      const Configuration predicted = make_configuration(design, std::move(s), std::move(f));
      auto trial = solve_tension(design, tau_new, loads, predicted, opts.inner);
      const TendonPair r_new = tendon_lengths(design, trial.config) - target_lengths;
      const double obj_new = 0.5 * r_new.squaredNorm();
      // Changes below the roundoff of 0.5 |l - l_des|^2 are ties; break them by the gradient norm.
      const double band = kLengthRoundoff * resid.norm() * (target_lengths.norm() + resid.norm());
      TensionResponse resp_new;
      bool better = obj_new <= objective - band;
      if (!better && obj_new <= objective + band) {
        resp_new = tension_response(design, trial.config, tau_new, loads);
        better = projected(resp_new.J.transpose() * r_new, tau_new, floor).norm() < projected(grad, tau, floor).norm();
      } else if (better) {
        resp_new = tension_response(design, trial.config, tau_new, loads);
      }
      if (better) {
        const Eigen::Vector2d grad_old = grad;
        tau = tau_new;
        config = std::move(trial.config);
        report.equilibrium = std::move(trial.report);
        resid = r_new;
        objective = obj_new;
        resp = std::move(resp_new);
        grad = resp.J.transpose() * resid;
        report.objective_history.push_back(objective);
        accepted = true;
        const double sy = dtau.dot(grad - grad_old);
        bb_alpha = sy > 0.0 ? dtau.squaredNorm() / sy : 0.0;
      }
    } catch (const NoConvergence&) {
    } catch (const ContactRolloff&) {
    } catch (const DegenerateTendon&) {
    } catch (const SingularBlock&) {
    }
    if (accepted) {
      alpha = opts.step_rule == StepRule::barzilai_borwein && bb_alpha > 0.0 ? bb_alpha : alpha * opts.step_growth;
    } else {
      alpha *= opts.step_shrink;
      ++report.rejected_steps;
    }
  }

  if ((tau.array() <= floor).all()) throw TensionFloor("both tendon tensions are pinned at the floor");

  if (opts.normalized_min_tension && unloaded(loads)) {
    const double k = *opts.normalized_min_tension / tau.minCoeff();
    tau *= k;
    for (auto& fk : config.f) fk *= k;
  }

  report.converged = true;
  report.floor_active = (tau.array() <= floor).any();
  report.objective = objective;
  report.gradient_norm = projected(grad, tau, floor).norm();
  report.achieved_lengths = tendon_lengths(design, config);
  return {tau, std::move(config), std::move(report)};
}

}  // namespace rolljoint
