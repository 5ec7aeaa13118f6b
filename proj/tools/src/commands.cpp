#include "rolljoint/cli/commands.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "rolljoint/cli/output.hpp"
#include "rolljoint/cli/verify.hpp"
#include "rolljoint/errors.hpp"

namespace rolljoint::cli {
namespace {

void apply_flags(Scenario& sc, const Flags& flags) {
  if (flags.tol) sc.solver.tol_residual = *flags.tol;
  if (flags.max_iters) sc.solver.max_iters = *flags.max_iters;
  sc.displacement.inner = sc.solver;
}

nlohmann::json outcome_json(const RunOutcome& r, const Scenario& sc, const MechanismDesign& design) {
  nlohmann::json j;
  j["status"] = r.status;
  if (!r.message.empty()) j["message"] = r.message;
  j["mode"] = sc.mode == ActuationMode::tension ? "tension" : "displacement";
  j["tension"] = {round12(r.tension[0]), round12(r.tension[1])};
  if (r.config) {
    const TendonPair l = tendon_lengths(design, *r.config);
    j["tendon_lengths"] = {round12(l[0]), round12(l[1])};
  }
  j["solve"] = report_json(r.report);
  if (r.displacement) j["displacement"] = displacement_report_json(*r.displacement, sc.lengths);
  return j;
}

void write_outputs(const std::filesystem::path& dir, const MechanismDesign& design, const Scenario& sc,
                   const RunOutcome& r, bool svg) {
  std::filesystem::create_directories(dir);
  if (r.config) write_solution_csv(dir / "solution.csv", design, *r.config);
  write_json(dir / "report.json", outcome_json(r, sc, design));
  if (svg && r.config) {
    const SvgFrame frame{r.config->poses, sc.loads, 1.0};
    write_svg(dir / "config.svg", design, std::span<const SvgFrame>(&frame, 1));
  }
}

struct SweepItem {
  std::string value;
  std::optional<Scenario> scenario;
  RunOutcome outcome;
};

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RunOutcome run_scenario(const MechanismDesign& design, const Scenario& sc, const std::optional<Configuration>& init) {
  RunOutcome r;
  r.tension = sc.mode == ActuationMode::tension ? sc.tension : sc.tension_init;
  try {
    if (sc.mode == ActuationMode::tension) {
      auto sol = solve_tension(design, sc.tension, sc.loads, init, sc.solver);
      r.config = std::move(sol.config);
      r.report = std::move(sol.report);
    } else {
      auto sol = solve_displacement(design, sc.lengths, sc.loads, sc.tension_init, sc.displacement, init);
      r.config = std::move(sol.config);
      r.tension = sol.tension;
      r.report = sol.report.equilibrium;
      r.displacement = std::move(sol.report);
      if (!r.displacement->converged) {
        r.exit_code = kExitNoConvergence;
        r.status = "no_convergence";
        r.message = "displacement iteration limit reached";
        return r;
      }
    }
    r.status = "converged";
  } catch (const ContactRolloff& e) {
    r.exit_code = kExitRolloff;
    r.status = "rolloff";
    r.message = e.what();
    r.config = e.last;
    r.report = e.report;
  } catch (const NoConvergence& e) {
    r.exit_code = kExitNoConvergence;
    r.status = "no_convergence";
    r.message = e.what();
    r.config = e.last;
    r.report = e.report;
  } catch (const TensionFloor& e) {
    r.exit_code = kExitNoConvergence;
    r.status = "tension_floor";
    r.message = e.what();
  } catch (const Error& e) {
    r.exit_code = kExitNoConvergence;
    r.status = "solver_error";
    r.message = e.what();
  }
  return r;
}

MechanismDesign load_valid_design(const std::filesystem::path& path) {
  MechanismDesign design = load_design(path);
  const auto problems = validate(design);
  if (!problems.empty()) {
    std::string msg = path.string() + ": invalid design";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ParseError(msg);
  }
  return design;
}

int cmd_solve(const std::filesystem::path& design_path, const std::filesystem::path& scenario_path,
              const std::filesystem::path& out_dir, const Flags& flags, std::ostream& log) {
  try {
    const MechanismDesign design = load_valid_design(design_path);
    Scenario sc = load_scenario(scenario_path, design.link_count());
    apply_flags(sc, flags);
    const RunOutcome r = run_scenario(design, sc);
    write_outputs(out_dir, design, sc, r, flags.svg);
    spdlog::info("solve: {} after {} iterations, residual {:.3e}", r.status, r.report.iterations,
                 r.report.final_residual_norm);
    if (r.exit_code != kExitOk) log << "solve failed: " << r.status << ": " << r.message << '\n';
    return r.exit_code;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_sweep(const std::filesystem::path& design_path, const std::filesystem::path& scenario_path,
              const std::filesystem::path& sweep_path, const std::filesystem::path& out_dir, const Flags& flags,
              std::ostream& log) {
  std::vector<SweepItem> items;
  std::optional<MechanismDesign> design;
  try {
    design = load_valid_design(design_path);
    const json base = read_json(scenario_path);
    const json spec = read_json(sweep_path);
    if (!spec.is_object() || !spec.contains("parameter") || !spec["parameter"].is_string())
      throw ParseError(sweep_path.string() + ": missing string field 'parameter'");
    if (!spec.contains("values") || !spec["values"].is_array())
      throw ParseError(sweep_path.string() + ": missing array field 'values'");
    if (spec["values"].empty()) throw ParseError(sweep_path.string() + ": empty sweep list");
    json::json_pointer ptr;
    try {
      ptr = json::json_pointer(spec["parameter"].get<std::string>());
    } catch (const json::exception& e) {
      throw ParseError(sweep_path.string() + ": bad parameter path: " + e.what());
    }
    for (const json& v : spec["values"]) {
      SweepItem item;
      item.value = v.dump();
      json j = base;
      try {
        j[ptr] = v;
        item.scenario = parse_scenario(j, design->link_count());
        apply_flags(*item.scenario, flags);
      } catch (const std::exception& e) {
        item.outcome.exit_code = kExitParse;
        item.outcome.status = "parse_error";
        item.outcome.message = e.what();
      }
      items.push_back(std::move(item));
    }
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }

  auto item_dir = [&](std::size_t i) {
    std::ostringstream os;
    os << "item_" << std::setw(3) << std::setfill('0') << i;
    return out_dir / os.str();
  };
  auto run_item = [&](std::size_t i, const std::optional<Configuration>& init) {
    SweepItem& item = items[i];
    if (!item.scenario) return;
    item.outcome = run_scenario(*design, *item.scenario, init);
    write_outputs(item_dir(i), *design, *item.scenario, item.outcome, flags.svg);
    spdlog::info("sweep item {} ({}): {}", i, item.value, item.outcome.status);
  };

  try {
    std::filesystem::create_directories(out_dir);
    if (flags.jobs <= 1) {
      std::optional<Configuration> warm;
      for (std::size_t i = 0; i < items.size(); ++i) {
        run_item(i, warm);
        if (items[i].outcome.exit_code == kExitOk) warm = items[i].outcome.config;
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < flags.jobs; ++t)
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < items.size(); i = next++) run_item(i, std::nullopt);
        });
      for (auto& th : pool) th.join();
    }

    std::ofstream csv(out_dir / "sweep.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (out_dir / "sweep.csv").string());
    csv << "item,value,status,iterations,final_residual,tau_left_N,tau_right_N,tip_x_mm,tip_y_mm,tip_theta_rad,"
           "l_left_mm,l_right_mm\n";
    std::vector<SvgFrame> frames;
    int exit = kExitOk;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const RunOutcome& r = items[i].outcome;
      csv << i << ',' << csv_quote(items[i].value) << ',' << r.status << ',' << r.report.iterations << ','
          << format_number(r.report.final_residual_norm) << ',' << format_number(r.tension[0]) << ','
          << format_number(r.tension[1]) << ',';
      if (r.config && r.exit_code == kExitOk) {
        const Pose2& tip = r.config->poses.back();
        const TendonPair l = tendon_lengths(*design, *r.config);
        csv << format_number(tip.translation().x()) << ',' << format_number(tip.translation().y()) << ','
            << format_number(tip.angle()) << ',' << format_number(l[0]) << ',' << format_number(l[1]) << '\n';
        frames.push_back({r.config->poses, items[i].scenario->loads, 0.0});
      } else {
        csv << ",,,,\n";
      }
      if (r.exit_code != kExitOk) {
        log << "item " << i << " (" << items[i].value << "): " << r.status << ": " << r.message << '\n';
        if (exit == kExitOk) exit = r.exit_code;
      }
    }
    if (flags.svg && !frames.empty()) {
      for (std::size_t k = 0; k < frames.size(); ++k)
        frames[k].opacity = 0.35 + 0.65 * static_cast<double>(k + 1) / static_cast<double>(frames.size());
      write_svg(out_dir / "sweep.svg", *design, frames);
    }
    return exit;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_verify(const std::filesystem::path& design_path, const Flags& flags, std::ostream& out) {
  std::optional<MechanismDesign> design;
  try {
    design = load_valid_design(design_path);
  } catch (const ParseError& e) {
    out << "error: " << e.what() << '\n';
    return kExitParse;
  }

  const auto results = run_verify(*design, flags.seed);
  bool all = true;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    all = all && r.pass;
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.name << (r.pass ? "PASS" : "FAIL") << "  "
        << std::right << std::fixed << std::setprecision(3) << std::setw(8) << r.seconds << " s  " << r.detail
        << '\n';
  }
  out << (all ? "all checks passed" : "verification FAILED") << '\n';
  return all ? kExitOk : kExitVerify;
}

}  // namespace rolljoint::cli
