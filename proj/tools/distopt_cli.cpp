// Command-line driver: run, sweep, optimum, validate.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distopt/commands.hpp"
#include "distopt/errors.hpp"

namespace {

void add_scenario_options(CLI::App& cmd, distopt::RunConfig& config,
                          std::string& variant) {
  cmd.add_option("--scenario", config.scenario,
                 "Scenario file or bundled scenario name")
      ->required();
  cmd.add_option("--out", config.out_dir, "Output directory");
  cmd.add_option("--variant", variant, "online | offline | sigma_mod")
      ->check(CLI::IsMember({"online", "offline", "sigma_mod"}));
  cmd.add_option("--epsilon", config.epsilon, "High-gain parameter");
  cmd.add_option("--sigma", config.sigma, "Leakage for sigma_mod");
  cmd.add_option("--lambda-gain", config.lambda_gain,
                 "Adaptation gain (scalar times identity)");
  cmd.add_option("--step", config.step, "RK4 step");
  cmd.add_option("--t-end", config.t_end, "Simulation horizon");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument(item);
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed optimization with adaptive embedded control"};
  app.require_subcommand(1);

  distopt::RunConfig config;
  std::string variant;

  auto* run = app.add_subcommand("run", "Simulate a scenario");
  add_scenario_options(*run, config, variant);
  run->add_flag("--plots", config.plots, "Write SVG plots");

  std::string parameter;
  std::string values_text;
  auto* sweep = app.add_subcommand("sweep", "Run one simulation per value");
  add_scenario_options(*sweep, config, variant);
  sweep->add_option("--parameter", parameter,
                    "epsilon | sigma | lambda_gain | step")
      ->required();
  sweep->add_option("--values", values_text, "Comma-separated values")
      ->required();

  auto* optimum = app.add_subcommand("optimum", "Minimize the global cost");
  optimum->add_option("--scenario", config.scenario,
                      "Scenario file or bundled scenario name")
      ->required();

  auto* validate = app.add_subcommand("validate", "Check a scenario");
  add_scenario_options(*validate, config, variant);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : distopt::kExitValidation;
  }

  if (!variant.empty()) config.variant = distopt::parse_variant(variant);

  if (*run) return distopt::cmd_run(config, std::cout, std::cerr);
  if (*sweep) {
    std::vector<double> values;
    try {
      values = parse_values(values_text);
    } catch (const std::exception&) {
      std::cerr << "error: --values must be a comma-separated list of numbers\n";
      return distopt::kExitValidation;
    }
    return distopt::cmd_sweep(config, parameter, values, std::cout, std::cerr);
  }
  if (*optimum) return distopt::cmd_optimum(config, std::cout, std::cerr);
  if (*validate) return distopt::cmd_validate(config, std::cout, std::cerr);
  return distopt::kExitValidation;
}
