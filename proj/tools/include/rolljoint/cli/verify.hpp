#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rolljoint/loads.hpp"
#include "rolljoint/mechanism.hpp"
#include "rolljoint/solver_tension.hpp"

namespace rolljoint::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyScenario {
  std::string name;
  TendonPair tension;
  std::vector<ExternalLoad> loads;
  bool conservative = true;  // every load has a potential
  bool unloaded() const { return loads.empty(); }
};

/// A fixed mix of unloaded and loaded scenarios sized to the design.
std::vector<VerifyScenario> standard_scenarios(const MechanismDesign& design);

// Measurements behind the checks, exposed for the test suites.

/// |h(x + eps d) - h(x) - eps L d| where L is the block linearization; d is
/// (ds, df) per joint, optionally with a tension direction dtau.
double linearization_error(const MechanismDesign& design, const Configuration& config, const TendonPair& tension,
                           std::span<const ExternalLoad> loads, const Eigen::VectorXd& direction,
                           const TendonPair& dtau, double eps);

/// Central-difference dl/dtau by re-solving the equilibrium at tau +/- step e_k.
Eigen::Matrix2d jacobian_by_resolve(const MechanismDesign& design, const Configuration& config,
                                    const TendonPair& tension, std::span<const ExternalLoad> loads,
                                    double rel_step = 1e-4);

/// Largest difference in link positions [mm] and angles [rad].
struct PoseGap {
  double position = 0.0;
  double angle = 0.0;
};
PoseGap pose_gap(std::span<const Pose2> a, std::span<const Pose2> b);

CheckResult check_geometry_identities(std::mt19937_64& rng, int samples);
CheckResult check_surface_odes(const MechanismDesign& design);
CheckResult check_load_derivatives(std::mt19937_64& rng, int samples);
CheckResult check_direction_derivatives(const MechanismDesign& design, std::mt19937_64& rng);
CheckResult check_block_linearization(const MechanismDesign& design, std::span<const VerifyScenario> scenarios,
                                      std::mt19937_64& rng);
CheckResult check_dense_oracle(const MechanismDesign& design, std::span<const VerifyScenario> scenarios);
CheckResult check_energy(const MechanismDesign& design, std::span<const VerifyScenario> scenarios);
CheckResult check_jacobian(const MechanismDesign& design, std::span<const VerifyScenario> scenarios);

std::vector<CheckResult> run_verify(const MechanismDesign& design, std::uint64_t seed);

}  // namespace rolljoint::cli
