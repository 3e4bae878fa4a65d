#include "distopt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "distopt/errors.hpp"
#include "distopt/plot.hpp"
#include "distopt/scenario_io.hpp"
#include "distopt/trajectory_io.hpp"

namespace distopt {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void apply_overrides(const RunConfig& config, ScenarioSpec& spec) {
  if (config.variant) spec.controller.variant = *config.variant;
  if (config.epsilon) spec.controller.epsilon = *config.epsilon;
  if (config.sigma) spec.controller.sigma = *config.sigma;
  if (config.lambda_gain) spec.controller.lambda_gain = *config.lambda_gain;
  if (config.step) spec.integrator.step = *config.step;
  if (config.t_end) spec.integrator.t_end = *config.t_end;
}

ScenarioSpec load_spec(const RunConfig& config) {
  ScenarioSpec spec = load_scenario_spec(resolve_scenario(config.scenario));
  apply_overrides(config, spec);
  return spec;
}

// Maps library exceptions onto exit codes and prints one diagnostic line.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

std::string describe_divergence(const Divergence& d) {
  std::string s = "blow-up at t = " + fmt(d.time) + " (agents";
  for (std::size_t a : d.agents) s += " " + std::to_string(a + 1);
  return s + ")";
}

std::string to_text(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream ss;
  writer(ss);
  return ss.str();
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SIM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct SweepCell {
  double value = 0.0;
  std::string status = "ok";
  std::string detail;
  std::optional<Summary> summary;
};

void set_parameter(ScenarioSpec& spec, const std::string& parameter,
                   double value) {
  if (parameter == "epsilon") {
    spec.controller.epsilon = value;
  } else if (parameter == "sigma") {
    spec.controller.sigma = value;
  } else if (parameter == "lambda_gain") {
    spec.controller.lambda_gain = value;
  } else if (parameter == "step") {
    spec.integrator.step = value;
  }
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scenario = build_scenario(load_spec(config));
    for (const auto& w : scenario.warnings()) err << "warning: " << w << '\n';
    ensure_dir(config.out_dir);

    const Trajectory traj = run(scenario);
    write_file_atomic(config.out_dir / "trajectory.csv",
                      to_text([&](std::ostream& o) { write_trajectory_csv(o, traj); }));
    if (traj.diverged()) {
      err << "diverged: " << describe_divergence(*traj.divergence) << '\n';
      return static_cast<int>(kExitDivergence);
    }

    const Summary summary = metrics(traj);
    write_file_atomic(config.out_dir / "metrics.txt",
                      to_text([&](std::ostream& o) { write_metrics(o, summary); }));

    const double horizon = traj.times.back();
    if (horizon >= scenario.pe.start + scenario.pe.window) {
      const PeReport pe = pe_monitor(traj, scenario);
      write_file_atomic(config.out_dir / "pe_report.txt",
                        to_text([&](std::ostream& o) { write_pe_report(o, pe); }));
    } else {
      err << "warning: horizon shorter than PE start + window; "
             "pe_report.txt not written\n";
    }

    if (config.plots) {
      write_file_atomic(config.out_dir / "outputs.svg",
                        render_svg({outputs_panel(traj)}));
      write_file_atomic(config.out_dir / "estimates_1_2.svg",
                        render_svg({estimate_panel(traj, 0), estimate_panel(traj, 1)}));
      write_file_atomic(config.out_dir / "estimates_3_4.svg",
                        render_svg({estimate_panel(traj, 2), estimate_panel(traj, 3)}));
    }

    out << "y* = " << fmt(summary.y_star) << '\n'
        << "t_final = " << fmt(summary.t_final) << '\n'
        << "max |y_i - y*| = " << fmt(summary.max_final_gap) << '\n'
        << "consensus spread = " << fmt(summary.consensus_spread) << '\n'
        << "max tracking error = " << fmt(summary.max_tracking_error) << '\n'
        << "lambda sum drift = " << fmt(summary.lambda_sum_drift) << '\n'
        << "outputs written to " << config.out_dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const RunConfig& config, const std::string& parameter,
              const std::vector<double>& values, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    static const std::vector<std::string> kParameters{"epsilon", "sigma",
                                                      "lambda_gain", "step"};
    if (std::find(kParameters.begin(), kParameters.end(), parameter) ==
        kParameters.end()) {
      throw ValidationError("cannot sweep '" + parameter +
                            "' (expected epsilon, sigma, lambda_gain or step)");
    }
    const ScenarioSpec base = load_spec(config);
    ensure_dir(config.out_dir);

    std::vector<SweepCell> cells(values.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    const auto worker = [&] {
      for (std::size_t k = next++; k < values.size(); k = next++) {
        SweepCell& cell = cells[k];
        cell.value = values[k];
        try {
          ScenarioSpec spec = base;
          set_parameter(spec, parameter, values[k]);
          const Scenario scenario = build_scenario(spec);
          const Trajectory traj = run(scenario);
          if (traj.diverged()) {
            cell.status = "diverged";
            cell.detail = describe_divergence(*traj.divergence);
          } else {
            cell.summary = metrics(traj);
          }
        } catch (const ValidationError& e) {
          cell.status = "invalid";
          cell.detail = e.what();
        }
        const fs::path dir = config.out_dir / ("cell_" + std::to_string(k));
        try {
          ensure_dir(dir);
          write_file_atomic(dir / "metrics.txt", to_text([&](std::ostream& o) {
                              o << parameter << " = " << fmt(cell.value) << '\n'
                                << "status = " << cell.status << '\n';
                              if (!cell.detail.empty()) o << "detail = " << cell.detail << '\n';
                              if (cell.summary) write_metrics(o, *cell.summary);
                            }));
        } catch (const IoError& e) {
          std::lock_guard lock(err_mutex);
          err << "i/o error: " << e.what() << '\n';
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned workers = worker_count(values.size());
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream table;
    table << parameter
          << ",status,max_final_gap,max_tail_gap,consensus_spread,"
             "max_tracking_error,lambda_sum_drift,detail\n";
    for (const auto& c : cells) {
      table << fmt(c.value) << ',' << c.status;
      if (c.summary) {
        table << ',' << fmt(c.summary->max_final_gap) << ','
              << fmt(c.summary->max_tail_gap) << ','
              << fmt(c.summary->consensus_spread) << ','
              << fmt(c.summary->max_tracking_error) << ','
              << fmt(c.summary->lambda_sum_drift) << ',';
      } else {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        table << ",,,,,," << detail;
      }
      table << '\n';
    }
    write_file_atomic(config.out_dir / ("sweep_" + parameter + ".csv"), table.str());
    out << table.str();
    return static_cast<int>(kExitOk);
  });
}

int cmd_optimum(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path path = resolve_scenario(config.scenario);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    const ScenarioSpec spec = parse_cost_section(text.str());
    const CostSet costs = build_costs(spec);
    double y_star = 0.0;
    try {
      y_star = minimize_global(costs, spec.optimum_bracket, 1e-10);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) +
                            " (set optimum.bracket to a wider interval)");
    }
    char rounded[32];
    std::snprintf(rounded, sizeof rounded, "%.2f", y_star);
    out << "y* = " << rounded << '\n'
        << "y* (full precision) = " << fmt(y_star) << '\n'
        << "residual global gradient = " << fmt(global_gradient(costs, y_star))
        << '\n';
    for (std::size_t i = 0; i < costs.size(); ++i) {
      out << "agent " << (i + 1) << " gradient at y* = "
          << fmt(costs[i].grad(y_star)) << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scenario = build_scenario(load_spec(config));
    for (const auto& w : scenario.warnings()) err << "warning: " << w << '\n';
    out << "ok: " << scenario.size() << " agents, state dimension "
        << StateLayout(scenario).dim << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace distopt
