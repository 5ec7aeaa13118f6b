#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rolljoint/loads.hpp"
#include "rolljoint/mechanism.hpp"
#include "rolljoint/solver_displacement.hpp"
#include "rolljoint/solver_tension.hpp"

namespace rolljoint::cli {

using nlohmann::json;

enum class ActuationMode { tension, displacement };

struct Scenario {
  ActuationMode mode = ActuationMode::tension;
  TendonPair tension = TendonPair::Ones();       // tension mode [N]
  TendonPair lengths = TendonPair::Zero();       // displacement mode [mm]
  TendonPair tension_init = TendonPair::Ones();  // displacement mode starting tensions
  std::vector<ExternalLoad> loads;
  SolverOptions solver;
  DisplacementOptions displacement;
};

json read_json(const std::filesystem::path& path);

// Parsers throw ParseError with a JSON-pointer-ish location in the message.
MechanismDesign parse_design(const json& j);
MechanismDesign load_design(const std::filesystem::path& path);
json design_to_json(const MechanismDesign& design);

Scenario parse_scenario(const json& j, std::size_t link_count);
Scenario load_scenario(const std::filesystem::path& path, std::size_t link_count);

}  // namespace rolljoint::cli
