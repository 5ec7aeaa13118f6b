#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rolljoint/cli/commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("rolljoint");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ROLLJOINT_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using namespace rolljoint::cli;

  CLI::App app{"Quasi-static solver for tendon-driven rolling-contact joint mechanisms"};
  app.require_subcommand(1);

  Flags flags;
  std::string design, scenario, sweep, out = "out";
  double tol = 0;
  int max_iters = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--design", design, "mechanism design JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--tol", tol, "residual tolerance [N]")->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", max_iters, "Newton iteration limit")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "solve one scenario");
  common(solve);
  solve->add_option("--scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "output directory");
  solve->add_flag("--svg", flags.svg, "also write config.svg");

  auto* sw = app.add_subcommand("sweep", "solve a scenario over a list of parameter values");
  common(sw);
  sw->add_option("--scenario", scenario, "scenario template JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--sweep", sweep, "sweep spec JSON {parameter, values}")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", out, "output directory");
  sw->add_flag("--svg", flags.svg, "also write SVG files");
  sw->add_option("--jobs", flags.jobs, "parallel solves (disables warm starts)")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run finite-difference and oracle checks on a design");
  common(verify);
  verify->add_option("--seed", flags.seed, "seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }
  if (tol > 0) flags.tol = tol;
  if (max_iters > 0) flags.max_iters = max_iters;

  if (*solve) return cmd_solve(design, scenario, out, flags, std::cerr);
  if (*sw) return cmd_sweep(design, scenario, sweep, out, flags, std::cerr);
  return cmd_verify(design, flags, std::cout);
}
