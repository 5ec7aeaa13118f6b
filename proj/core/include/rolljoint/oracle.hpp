#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rolljoint/solver_tension.hpp"

namespace rolljoint::oracle {

// Brute-force references for the recursive solvers. Nothing here uses the
// block matrices or the recursive elimination.

struct DenseOptions {
  double tol_residual = 1e-9;
  int max_iters = 100;
  double step_s = 1e-6;  // FD step on contact parameters [mm]
  double step_f = 1e-6;  // FD step on contact forces [N]
};

/// Stacked unknowns (s_k, f_k) per joint and their residual.
struct DenseSystem {
  const MechanismDesign& design;
  TendonPair tension;
  std::span<const ExternalLoad> loads;

  std::size_t dimension() const { return 3 * design.joint_count(); }
  Eigen::VectorXd pack(const Configuration& config) const;
  Configuration unpack(const Eigen::VectorXd& x) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
  /// Central-difference Jacobian of residual().
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const DenseOptions& opts) const;
};

/// Damped Newton on the full system with a finite-difference Jacobian.
/// Throws NoConvergence or SingularJacobian.
TensionSolution dense_solve(const MechanismDesign& design, const TendonPair& tension,
                            std::span<const ExternalLoad> loads,
                            const std::optional<Configuration>& init = std::nullopt,
                            const DenseOptions& opts = {});

/// Total potential energy [N mm]: tendon work plus conservative external loads.
/// Throws UnsupportedLoad for loads without a potential (nonzero body-fixed wrenches).
double energy(const MechanismDesign& design, std::span<const double> s, const TendonPair& tension,
              std::span<const ExternalLoad> loads);

/// Central finite-difference gradient of energy() with respect to s.
std::vector<double> energy_gradient(const MechanismDesign& design, std::span<const double> s,
                                    const TendonPair& tension, std::span<const ExternalLoad> loads,
                                    double step = 1e-6);

struct NelderMeadOptions {
  double initial_step = 0.5;  // [mm]
  double tol = 1e-13;         // spread of simplex energies [N mm]
  int max_evals = 20000;
};

/// Local minimizer of energy() over s with each s_k clamped to its joint domain.
std::vector<double> energy_minimize(const MechanismDesign& design, const TendonPair& tension,
                                    std::span<const ExternalLoad> loads, std::vector<double> init_s,
                                    const NelderMeadOptions& opts = {});

}  // namespace rolljoint::oracle
