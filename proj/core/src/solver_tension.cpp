#include "rolljoint/solver_tension.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rolljoint {

namespace {

constexpr double kMaxCondition = 1e12;

Mat6 upper_block(const LinkBlocks& b) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = b.A;
  m.topRightCorner<3, 3>() = b.B;
  m.bottomRightCorner<3, 3>() = b.E;
  return m;
}

double residual_2norm(const MechanismDesign& design, std::span<const Vec3> h) {
  double acc = 0.0;
  for (const auto& r : scaled_residual(design, h)) acc += r.squaredNorm();
  return std::sqrt(acc);
}

bool at_boundary(const Interval& d, double s) {
  const double tol = 1e-12 * d.width();
  return s <= d.lo + tol || s >= d.hi - tol;
}

}  // namespace

BlockRecursion::BlockRecursion(std::span<const LinkBlocks> blocks) {
  const std::size_t m = blocks.size();
  P_.reserve(m);
  Q_.reserve(m);
  Mat6 P_total = Mat6::Identity();
  for (std::size_t b = 0; b < m; ++b) {
    const LinkBlocks& blk = blocks[b];
    Mat3 D_inv = Mat3::Identity();
    if (b + 1 < m) {
      const Eigen::PartialPivLU<Mat3> lu(blk.D);
      if (!(lu.rcond() * kMaxCondition >= 1.0)) {
        std::ostringstream os;
        os << "contact block D of link " << b + 2 << " is singular (rcond " << lu.rcond() << ")";
        throw SingularBlock(os.str());
      }
      D_inv = lu.inverse();
      ++inversions_;
    }
    Mat6 Q = Mat6::Identity();
    Q.bottomLeftCorner<3, 3>() = -D_inv * blk.C;
    Q.bottomRightCorner<3, 3>() = D_inv;
    Q_.push_back(Q);
    P_.push_back(-Q * upper_block(blk));
    P_total = P_.back() * P_total;
  }
  boundary_.setZero();
  boundary_.topLeftCorner<3, 3>() = Mat3::Identity();
  boundary_.rightCols<3>() = -P_total.rightCols<3>();
  // The unknowns mix radians, millimetres and newtons; balance rows and columns before factoring.
  row_scale_.setOnes();
  col_scale_.setOnes();
  Mat6 scaled = boundary_;
  for (int pass = 0; pass < 8; ++pass) {
    for (int i = 0; i < 6; ++i) {
      const double r = scaled.row(i).cwiseAbs().maxCoeff();
      if (r > 0.0) scaled.row(i) /= std::sqrt(r), row_scale_(i) /= std::sqrt(r);
    }
    for (int j = 0; j < 6; ++j) {
      const double c = scaled.col(j).cwiseAbs().maxCoeff();
      if (c > 0.0) scaled.col(j) /= std::sqrt(c), col_scale_(j) /= std::sqrt(c);
    }
  }
  boundary_lu_.compute(scaled);
  if (!(boundary_lu_.rcond() * kMaxCondition >= 1.0)) {
    std::ostringstream os;
    os << "boundary system is singular (rcond " << boundary_lu_.rcond() << ")";
    throw SingularBlock(os.str());
  }
}

BlockRecursion::Result BlockRecursion::solve(std::span<const Rhs> eps) const {
  const std::size_t m = P_.size();
  if (eps.size() != m) throw DomainError("one right-hand side per link block required");
  const Eigen::Index cols = m ? eps[0].cols() : 0;

  Rhs acc = Rhs::Zero(6, cols);
  for (std::size_t b = 0; b < m; ++b) acc = P_[b] * acc + Q_[b] * eps[b];
  const Rhs z = col_scale_.asDiagonal() * boundary_lu_.solve(row_scale_.asDiagonal() * acc);

  Result out;
  out.dxi_tip = z.topRows<3>();
  out.deta.reserve(m);
  Rhs dx = Rhs::Zero(6, cols);
  dx.bottomRows<3>() = z.bottomRows<3>();
  out.deta.push_back(dx.bottomRows<3>());
  for (std::size_t b = 0; b + 1 < m; ++b) {
    dx = P_[b] * dx + Q_[b] * eps[b];
    out.deta.push_back(dx.bottomRows<3>());
  }
  return out;
}

NewtonStep newton_step(const MechanismDesign& design, const Configuration& config,
                       const TendonPair& tension, std::span<const ExternalLoad> loads,
                       StepCounters* counters) {
  const auto blocks = assemble_blocks(design, config, tension, loads);
  const BlockRecursion rec(blocks);
  std::vector<BlockRecursion::Rhs> eps;
  eps.reserve(blocks.size());
  for (const auto& b : blocks) {
    BlockRecursion::Rhs e = BlockRecursion::Rhs::Zero(6, 1);
    e.bottomRows<3>() = -b.h;
    eps.push_back(std::move(e));
  }
  const auto res = rec.solve(eps);
  if (counters) {
    counters->block_inversions += rec.block_inversions();
    counters->boundary_solves += 1;
  }
  NewtonStep step;
  step.dxi_tip = res.dxi_tip.col(0);
  for (const auto& d : res.deta) {
    step.ds.push_back(d(0, 0));
    step.df.emplace_back(d(1, 0), d(2, 0));
  }
  return step;
}

namespace {

TensionSolution solve_from(const MechanismDesign& design, const TendonPair& tension,
                           std::span<const ExternalLoad> loads, Configuration config, const SolverOptions& opts) {
  SolveReport report;

  auto h = residual(design, config, tension, loads);
  double r_inf = scaled_residual_norm(design, h);
  double r_two = residual_2norm(design, h);
  report.residual_history.push_back(r_inf);

  while (r_inf > opts.tol_residual && report.iterations < opts.max_iters) {
    StepCounters counters;
    const NewtonStep step = newton_step(design, config, tension, loads, &counters);
    report.block_inversions += counters.block_inversions;
    report.boundary_solves += counters.boundary_solves;

    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0;; ++bt) {
      std::vector<double> s(config.s);
      std::vector<Vec2> f(config.f);
      std::vector<std::size_t> clamped;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const double target = s[k] + alpha * step.ds[k];
        s[k] = opts.clamp_s ? design.joint_domain(k).clamp(target) : target;
        if (s[k] != target) clamped.push_back(k);
        f[k] += alpha * step.df[k];
      }
      try {
        Configuration cand = make_configuration(design, std::move(s), std::move(f));
        auto h_c = residual(design, cand, tension, loads);
        const double r_c = residual_2norm(design, h_c);
        if (!opts.line_search || r_c < r_two || bt >= opts.max_backtracks) {
          config = std::move(cand);
          h = std::move(h_c);
          r_two = r_c;
          report.clamped_joints = std::move(clamped);
          accepted = true;
        }
      } catch (const DomainError&) {
        if (!opts.line_search) throw;
      } catch (const DegenerateTendon&) {
        if (!opts.line_search || bt >= opts.max_backtracks) throw;
      }
      if (accepted || bt >= opts.max_backtracks) break;
      alpha *= opts.backtrack_factor;
      ++report.backtrack_count;
    }
    ++report.iterations;
    if (!accepted) break;
    r_inf = scaled_residual_norm(design, h);
    report.residual_history.push_back(r_inf);
  }

  report.final_residual_norm = r_inf;
  report.converged = r_inf <= opts.tol_residual;

  std::vector<std::size_t> pinned;
  for (std::size_t k = 0; k < config.s.size(); ++k)
    if (at_boundary(design.joint_domain(k), config.s[k])) pinned.push_back(k);

  if (!pinned.empty() && (report.converged || !report.clamped_joints.empty())) {
    std::ostringstream os;
    os << "contact rolled off the surface domain at joint " << pinned.front() + 1;
    report.clamped_joints = pinned;
    throw ContactRolloff(os.str(), std::move(report), std::move(config));
  }
  if (!report.converged) {
    std::ostringstream os;
    os << "equilibrium not reached after " << report.iterations << " iterations (residual " << r_inf << ")";
    throw NoConvergence(os.str(), std::move(report), std::move(config));
  }
  return {std::move(config), std::move(report)};
}

}  // namespace

TensionSolution solve_tension(const MechanismDesign& design, const TendonPair& tension,
                              std::span<const ExternalLoad> loads, const std::optional<Configuration>& init,
                              const SolverOptions& opts) {
  if (!(tension.minCoeff() > 0.0)) throw DomainError("tendon tensions must be positive");
  if (!(opts.tol_residual > 0.0) || opts.max_iters < 1) throw DomainError("invalid solver options");

  Configuration start = init ? make_configuration(design, init->s, init->f)
                             : balance_contact_forces(design, initial_configuration(design), tension, loads);
  return solve_from(design, tension, loads, std::move(start), opts);
}

}  // namespace rolljoint
