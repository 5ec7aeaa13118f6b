#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rolljoint/loads.hpp"
#include "rolljoint/mechanism.hpp"
#include "rolljoint/solver_displacement.hpp"

namespace rolljoint::cli {

/// Shortest text for x at 12 significant digits ("%.12g", no negative zero).
std::string format_number(double x);
/// x rounded to 12 significant digits, for JSON output.
double round12(double x);

void write_solution_csv(std::ostream& os, const MechanismDesign& design, const Configuration& config);
void write_solution_csv(const std::filesystem::path& path, const MechanismDesign& design, const Configuration& config);

/// Link poses from a solution CSV, in link order.
std::vector<Pose2> read_solution_poses(const std::filesystem::path& path);

nlohmann::json report_json(const SolveReport& report);
nlohmann::json displacement_report_json(const DisplacementReport& report, const TendonPair& target);
/// Dump with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

struct SvgFrame {
  std::vector<Pose2> poses;
  std::vector<ExternalLoad> loads;
  double opacity = 1.0;
};

/// Link outlines, tendon polylines and load arrows (10 mm per N), y axis up.
void write_svg(const std::filesystem::path& path, const MechanismDesign& design, std::span<const SvgFrame> frames);

}  // namespace rolljoint::cli
