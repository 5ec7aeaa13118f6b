#include "rolljoint/oracle.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rolljoint::oracle {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double scaled_norm(const MechanismDesign& design, const Eigen::VectorXd& r, bool inf) {
  Eigen::VectorXd scaled = r;
  for (Eigen::Index i = 0; i < scaled.size(); i += 3) scaled(i) /= design.characteristic_length();
  return inf ? scaled.lpNorm<Eigen::Infinity>() : scaled.norm();
}

}  // namespace

Eigen::VectorXd DenseSystem::pack(const Configuration& config) const {
  Eigen::VectorXd x(dimension());
  for (std::size_t k = 0; k < design.joint_count(); ++k) {
    x(3 * k) = config.s[k];
    x.segment<2>(3 * k + 1) = config.f[k];
  }
  return x;
}

Configuration DenseSystem::unpack(const Eigen::VectorXd& x) const {
  std::vector<double> s(design.joint_count());
  std::vector<Vec2> f(design.joint_count());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = x(3 * k);
    f[k] = x.segment<2>(3 * k + 1);
  }
  return make_configuration(design, std::move(s), std::move(f));
}

Eigen::VectorXd DenseSystem::residual(const Eigen::VectorXd& x) const {
  const auto h = rolljoint::residual(design, unpack(x), tension, loads);
  Eigen::VectorXd r(dimension());
  for (std::size_t i = 0; i < h.size(); ++i) r.segment<3>(3 * i) = h[i];
  return r;
}

Eigen::MatrixXd DenseSystem::jacobian(const Eigen::VectorXd& x, const DenseOptions& opts) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd J(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const bool is_s = c % 3 == 0;
    double h = is_s ? opts.step_s : opts.step_f;
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    double lo_step = h;
    double hi_step = h;
    if (is_s) {
      const Interval dom = design.joint_domain(static_cast<std::size_t>(c / 3));
      hi_step = std::min(h, dom.hi - x(c));
      lo_step = std::min(h, x(c) - dom.lo);
    }
    xp(c) += hi_step;
    xm(c) -= lo_step;
    J.col(c) = (residual(xp) - residual(xm)) / (hi_step + lo_step);
  }
  return J;
}

namespace {

TensionSolution dense_from(const MechanismDesign& design, const TendonPair& tension,
                           std::span<const ExternalLoad> loads, const Configuration& start, const DenseOptions& opts) {
  const DenseSystem sys{design, tension, loads};
  Eigen::VectorXd x = sys.pack(start);
  SolveReport report;
  Eigen::VectorXd r = sys.residual(x);
  double r_inf = scaled_norm(design, r, true);
  report.residual_history.push_back(r_inf);

  while (r_inf > opts.tol_residual && report.iterations < opts.max_iters) {
    const Eigen::MatrixXd J = sys.jacobian(x, opts);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) throw SingularJacobian("dense oracle Jacobian is singular");
    const Eigen::VectorXd dx = lu.solve(-r);

    const double r_two = scaled_norm(design, r, false);
    double alpha = 1.0;
    for (int bt = 0; bt <= 30; ++bt, alpha *= 0.5) {
      Eigen::VectorXd xc = x + alpha * dx;
      for (std::size_t k = 0; k < design.joint_count(); ++k)
        xc(3 * k) = design.joint_domain(k).clamp(xc(3 * k));
      try {
        const Eigen::VectorXd rc = sys.residual(xc);
        if (scaled_norm(design, rc, false) < r_two || bt == 30) {
          x = xc;
          r = rc;
          break;
        }
      } catch (const Error&) {
      }
      ++report.backtrack_count;
    }
    ++report.iterations;
    r_inf = scaled_norm(design, r, true);
    report.residual_history.push_back(r_inf);
  }
  report.final_residual_norm = r_inf;
  report.converged = r_inf <= opts.tol_residual;
  Configuration config = sys.unpack(x);
  if (!report.converged) {
    std::ostringstream os;
    os << "dense oracle did not converge (residual " << r_inf << ")";
    throw NoConvergence(os.str(), std::move(report), std::move(config));
  }
  return {std::move(config), std::move(report)};
}

}  // namespace

TensionSolution dense_solve(const MechanismDesign& design, const TendonPair& tension,
                            std::span<const ExternalLoad> loads, const std::optional<Configuration>& init,
                            const DenseOptions& opts) {
  return dense_from(design, tension, loads,
                    init ? make_configuration(design, init->s, init->f)
                         : balance_contact_forces(design, initial_configuration(design), tension, loads),
                    opts);
}

double energy(const MechanismDesign& design, std::span<const double> s, const TendonPair& tension,
              std::span<const ExternalLoad> loads) {
  const auto poses = forward_poses(design, s);
  double e = tension.dot(tendon_lengths(design, s));
  for (const auto& load : loads) {
    const Pose2& T = poses.at(load.link);
    e += std::visit(overloaded{
                        [](const ConstantBody& l) -> double {
                          if (l.wrench.m != 0.0 || !l.wrench.f.isZero())
                            throw UnsupportedLoad("body-fixed loads have no potential energy");
                          return 0.0;
                        },
                        [&](const ConstantWorkspace& l) {
                          return -l.wrench.f.dot(T.apply(l.attach)) - l.wrench.m * T.angle();
                        },
                        [&](const LinearSpring& l) {
                          return 0.5 * l.stiffness * (T.translation() - l.anchor).squaredNorm();
                        },
                    },
                    load.model);
  }
  return e;
}

std::vector<double> energy_gradient(const MechanismDesign& design, std::span<const double> s,
                                    const TendonPair& tension, std::span<const ExternalLoad> loads, double step) {
  std::vector<double> g(s.size());
  std::vector<double> sp(s.begin(), s.end());
  for (std::size_t k = 0; k < s.size(); ++k) {
    sp[k] = s[k] + step;
    const double ep = energy(design, sp, tension, loads);
    sp[k] = s[k] - step;
    const double em = energy(design, sp, tension, loads);
    sp[k] = s[k];
    g[k] = (ep - em) / (2.0 * step);
  }
  return g;
}

std::vector<double> energy_minimize(const MechanismDesign& design, const TendonPair& tension,
                                    std::span<const ExternalLoad> loads, std::vector<double> init_s,
                                    const NelderMeadOptions& opts) {
  const std::size_t d = init_s.size();
  std::vector<Interval> dom(d);
  for (std::size_t k = 0; k < d; ++k) dom[k] = design.joint_domain(k);

  int evals = 0;
  const auto cost = [&](const Eigen::VectorXd& x) {
    ++evals;
    std::vector<double> s(d);
    double penalty = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      s[k] = dom[k].clamp(x(static_cast<Eigen::Index>(k)));
      penalty += (x(static_cast<Eigen::Index>(k)) - s[k]) * (x(static_cast<Eigen::Index>(k)) - s[k]);
    }
    try {
      return energy(design, s, tension, loads) + 1e6 * penalty;
    } catch (const DegenerateTendon&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<Eigen::VectorXd> simplex(d + 1, Eigen::Map<const Eigen::VectorXd>(init_s.data(), static_cast<Eigen::Index>(d)));
  for (std::size_t k = 0; k < d; ++k) simplex[k + 1](static_cast<Eigen::Index>(k)) += opts.initial_step;
  std::vector<double> values(d + 1);
  for (std::size_t i = 0; i <= d; ++i) values[i] = cost(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  while (evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d - 1];
    if (values[worst] - values[best] <= opts.tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i <= d; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd xr = centroid + (centroid - simplex[worst]);
    const double fr = cost(xr);
    if (fr < values[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = cost(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                         : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
      const double fc = cost(xc);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = xc;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          values[i] = cost(simplex[i]);
        }
      }
    }
  }
  if (evals >= opts.max_evals) {
    SolveReport report;
    report.iterations = evals;
    throw NoConvergence("energy minimization exceeded its evaluation budget", report, Configuration{});
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  std::vector<double> s(d);
  for (std::size_t k = 0; k < d; ++k) s[k] = dom[k].clamp(simplex[static_cast<std::size_t>(best)](static_cast<Eigen::Index>(k)));
  return s;
}

}  // namespace rolljoint::oracle
