#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "distopt/control.hpp"

namespace distopt {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitDivergence = 3,
  kExitIo = 4,
};

struct RunConfig {
  std::string scenario;
  std::filesystem::path out_dir = "out";
  std::optional<AdaptiveVariant> variant;
  std::optional<double> epsilon;
  std::optional<double> sigma;
  std::optional<double> lambda_gain;
  std::optional<double> step;
  std::optional<double> t_end;
  bool plots = false;
};

// Writes trajectory.csv, metrics.txt, pe_report.txt and, with plots enabled,
// outputs.svg, estimates_1_2.svg and estimates_3_4.svg into out_dir.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

// One run per value of `parameter` (epsilon, sigma, lambda_gain or step).
// Writes sweep_<parameter>.csv plus cell_<k>/metrics.txt. Failed cells are
// marked in the table; the sweep itself still succeeds. Worker count is
// capped by $SIM_THREADS.
int cmd_sweep(const RunConfig& config, const std::string& parameter,
              const std::vector<double>& values, std::ostream& out,
              std::ostream& err);

// Prints y* and each agent's gradient at y*.
int cmd_optimum(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses and validates the scenario without running it.
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace distopt
