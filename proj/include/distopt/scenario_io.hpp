#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "distopt/sim.hpp"

namespace distopt {

// Plain-data form of a scenario file. Parsing fills it; build_scenario turns
// it into validated gains, models and costs. CLI overrides edit this form.
struct CostSpec {
  std::string kind;
  std::vector<double> params;
};

struct AgentSpec {
  // Either preset == "vdp" (a, b, v0) or an explicit chain (order, basis,
  // theta).
  std::optional<std::string> preset;
  double a = 1.0;
  double b = 1.0;
  std::vector<double> v0{1.0, 0.0};
  std::size_t order = 0;
  std::vector<std::string> basis;
  std::vector<double> theta;

  std::vector<double> x0;
  std::optional<double> r0;
  std::optional<double> lambda0;
  std::optional<std::vector<double>> theta_hat0;
  std::optional<std::vector<std::complex<double>>> poles;
  int line = 0;
};

struct ControllerSpec {
  AdaptiveVariant variant = AdaptiveVariant::kOnline;
  double epsilon = 0.2;
  std::optional<std::vector<std::complex<double>>> poles;
  double lambda_gain = 1.0;
  double sigma = 0.05;
};

struct ScenarioSpec {
  std::string name;
  std::size_t n_agents = 0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  std::vector<CostSpec> costs;
  std::vector<AgentSpec> agents;
  ControllerSpec controller;
  IntegratorConfig integrator{1e-3, 50.0, kDivergenceBound};
  std::size_t decimation = 10;
  PeSettings pe;
  Bracket optimum_bracket{-100.0, 100.0};
};

inline constexpr int kScenarioFormat = 1;

// Strict schema: unknown keys, wrong types and a missing or unsupported
// `format` raise ConfigError naming the field and line.
ScenarioSpec parse_scenario_spec(const std::string& text);
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);

// Reads only `format`, `costs` and `optimum`.
ScenarioSpec parse_cost_section(const std::string& text);

// Throws ValidationError naming the violated requirement.
Scenario build_scenario(const ScenarioSpec& spec);
CostSet build_costs(const ScenarioSpec& spec);

// A path to an existing file, or the name of a bundled scenario
// (<name>.yaml in $DISTOPT_SCENARIO_DIR or the install scenario directory).
// Throws IoError when neither exists.
std::filesystem::path resolve_scenario(const std::string& name_or_path);
std::filesystem::path bundled_scenario_dir();

}  // namespace distopt
