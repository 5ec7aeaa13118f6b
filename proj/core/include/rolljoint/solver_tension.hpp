#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rolljoint/errors.hpp"
#include "rolljoint/loads.hpp"
#include "rolljoint/mechanism.hpp"
#include "rolljoint/statics.hpp"

namespace rolljoint {

struct SolverOptions {
  double tol_residual = 1e-9;  // scaled residual infinity norm [N]
  int max_iters = 100;
  bool line_search = true;
  double backtrack_factor = 0.5;
  int max_backtracks = 20;
  bool clamp_s = true;
};

struct SolveReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  int backtrack_count = 0;
  std::vector<std::size_t> clamped_joints;  // 0-based, clamped on the last update
  bool converged = false;
  std::vector<double> residual_history;
  long block_inversions = 0;  // 3x3 D_i inversions, summed over iterations
  long boundary_solves = 0;   // 6x6 boundary solves, summed over iterations
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, SolveReport report, Configuration last)
      : Error(what), report(std::move(report)), last(std::move(last)) {}
  SolveReport report;
  Configuration last;
};

/// Converged (or stalled) with a contact parameter pinned at a surface boundary.
class ContactRolloff : public Error {
 public:
  ContactRolloff(const std::string& what, SolveReport report, Configuration last)
      : Error(what), report(std::move(report)), last(std::move(last)) {}
  SolveReport report;
  Configuration last;
};

/// Recursive elimination of the block-bidiagonal Newton system. Building it
/// inverts D_i for every interior link (n-2 inversions) and factors the 6x6
/// boundary matrix [[I; 0], -P_eta] once; solve() may then be called with any
/// number of right-hand-side columns.
class BlockRecursion {
 public:
  using Rhs = Eigen::Matrix<double, 6, Eigen::Dynamic>;

  /// Throws SingularBlock when a D_i or the equilibrated boundary matrix has condition number above 1e12.
  explicit BlockRecursion(std::span<const LinkBlocks> blocks);

  struct Result {
    std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> deta;  // (ds, df) per joint
    Eigen::Matrix<double, 3, Eigen::Dynamic> dxi_tip;
  };
  /// eps[b] is the right-hand side of the block for link b+1.
  Result solve(std::span<const Rhs> eps) const;

  long block_inversions() const { return inversions_; }

 private:
  std::vector<Mat6> P_;
  std::vector<Mat6> Q_;
  Mat6 boundary_;
  Vec6 row_scale_;
  Vec6 col_scale_;
  Eigen::PartialPivLU<Mat6> boundary_lu_;  // of the row/column equilibrated boundary matrix
  long inversions_ = 0;
};

struct NewtonStep {
  std::vector<double> ds;
  std::vector<Vec2> df;
  Vec3 dxi_tip = Vec3::Zero();
};

struct StepCounters {
  long block_inversions = 0;
  long boundary_solves = 0;
};

/// One full Newton step for the equilibrium equations at the given configuration.
NewtonStep newton_step(const MechanismDesign& design, const Configuration& config,
                       const TendonPair& tension, std::span<const ExternalLoad> loads,
                       StepCounters* counters = nullptr);

struct TensionSolution {
  Configuration config;
  SolveReport report;
};

/// Equilibrium configuration for the given tendon tensions. Starts from init
/// when given, otherwise from the joint-domain midpoints with contact forces
/// from balance_contact_forces().
/// Throws NoConvergence, ContactRolloff, SingularBlock, DegenerateTendon.
TensionSolution solve_tension(const MechanismDesign& design, const TendonPair& tension,
                              std::span<const ExternalLoad> loads,
                              const std::optional<Configuration>& init = std::nullopt,
                              const SolverOptions& opts = {});

}  // namespace rolljoint
