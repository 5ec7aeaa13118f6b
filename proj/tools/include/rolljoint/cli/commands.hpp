#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "rolljoint/cli/io.hpp"

namespace rolljoint::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitParse = 2,
  kExitNoConvergence = 3,
  kExitRolloff = 4,
  kExitVerify = 5,
};

struct Flags {
  std::optional<double> tol;
  std::optional<int> max_iters;
  bool svg = false;
  std::uint64_t seed = 1;
  int jobs = 1;
};

/// Result of running one scenario; config is the last iterate on failure when available.
struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;  // converged, no_convergence, rolloff, ...
  std::string message;
  std::optional<Configuration> config;
  TendonPair tension = TendonPair::Zero();
  SolveReport report;
  std::optional<DisplacementReport> displacement;
};

RunOutcome run_scenario(const MechanismDesign& design, const Scenario& scenario,
                        const std::optional<Configuration>& init = std::nullopt);

/// Load a design and reject it unless validate() is clean. Throws ParseError.
MechanismDesign load_valid_design(const std::filesystem::path& path);

int cmd_solve(const std::filesystem::path& design, const std::filesystem::path& scenario,
              const std::filesystem::path& out_dir, const Flags& flags, std::ostream& log);
int cmd_sweep(const std::filesystem::path& design, const std::filesystem::path& scenario,
              const std::filesystem::path& sweep, const std::filesystem::path& out_dir, const Flags& flags,
              std::ostream& log);
int cmd_verify(const std::filesystem::path& design, const Flags& flags, std::ostream& out);

}  // namespace rolljoint::cli
