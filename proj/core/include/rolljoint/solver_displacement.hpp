#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rolljoint/solver_tension.hpp"

namespace rolljoint {

/// How the step size changes after an accepted step. Both halve it after a rejected one.
enum class StepRule {
  adaptive,          // grow by step_growth
  barzilai_borwein,  // s's / s'y from the last accepted step and gradient change
};

struct DisplacementOptions {
  std::optional<double> alpha;  // initial step size; default 1 / |J|_F^2
  StepRule step_rule = StepRule::barzilai_borwein;
  double grad_tol = 1e-10;
  int max_outer_iters = 500;
  double tension_floor = 1e-3;  // [N]
  double step_growth = 1.2;
  double step_shrink = 0.5;
  /// Unloaded mechanisms only: rescale the returned tensions (and contact
  /// forces) so that the smaller tension equals this value.
  std::optional<double> normalized_min_tension;
  SolverOptions inner;
};

struct DisplacementReport {
  int outer_iterations = 0;
  bool converged = false;
  bool floor_active = false;  // a tension sat on the floor at return
  double objective = 0.0;     // 0.5 |l - l_des|^2 [mm^2]
  double gradient_norm = 0.0;
  TendonPair achieved_lengths = TendonPair::Zero();
  std::vector<double> objective_history;  // accepted iterates only
  int rejected_steps = 0;
  SolveReport equilibrium;  // last inner solve
};

struct DisplacementSolution {
  TendonPair tension;
  Configuration config;
  DisplacementReport report;
};

/// Both tensions were driven onto the floor; the target asks for pushing tendons.
class TensionFloor : public Error {
 public:
  using Error::Error;
};

/// Linear response of the equilibrium to tension changes, by impulse test.
struct TensionResponse {
  Eigen::Matrix2d J;                             // dl/dtau
  std::vector<Eigen::Matrix<double, 3, 2>> H;    // (ds, df) per joint per unit dtau
};
TensionResponse tension_response(const MechanismDesign& design, const Configuration& config,
                                 const TendonPair& tension, std::span<const ExternalLoad> loads);

/// Tendon length Jacobian dl/dtau at an equilibrium configuration.
inline Eigen::Matrix2d tendon_jacobian(const MechanismDesign& design, const Configuration& config,
                                       const TendonPair& tension, std::span<const ExternalLoad> loads) {
  return tension_response(design, config, tension, loads).J;
}

/// Tensions minimizing 0.5 |l - l_des|^2 subject to equilibrium, by gradient
/// descent on tau with the equilibrium corrected after every step.
DisplacementSolution solve_displacement(const MechanismDesign& design, const TendonPair& target_lengths,
                                        std::span<const ExternalLoad> loads, const TendonPair& tension_init,
                                        const DisplacementOptions& opts = {},
                                        const std::optional<Configuration>& init = std::nullopt);

}  // namespace rolljoint
