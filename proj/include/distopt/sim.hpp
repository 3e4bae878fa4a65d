#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distopt/control.hpp"
#include "distopt/costs.hpp"
#include "distopt/graph.hpp"
#include "distopt/numerics.hpp"
#include "distopt/plant.hpp"

namespace distopt {

struct AgentController {
  GainSet gains;
  AdaptiveLaw law;
};

struct InitialState {
  Eigen::VectorXd x;
  double r = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd theta_hat;
};

// Persistence-of-excitation test constants: window T0, start t0, floor m.
struct PeSettings {
  double window = 2.0 * std::numbers::pi;
  double start = 10.0;
  double floor = 0.05;
};

inline constexpr double kDivergenceBound = 1e6;

struct Scenario {
  std::string name;
  Topology topology;
  CostSet costs;
  std::vector<AgentModel> agents;
  std::vector<AgentController> controllers;
  std::vector<InitialState> initial;
  IntegratorConfig integrator{1e-3, 50.0, kDivergenceBound};
  std::size_t decimation = 10;
  PeSettings pe;
  Bracket optimum_bracket{-100.0, 100.0};

  std::size_t size() const { return agents.size(); }

  // Throws ValidationError naming the violated requirement.
  void validate() const;
  // Non-fatal findings, e.g. a step too coarse for the chosen epsilon.
  std::vector<std::string> warnings() const;
};

// Offsets into the stacked state [x_1..x_N, r, lambda, theta_hat_1..N].
struct StateLayout {
  std::vector<std::size_t> x_offset;
  std::vector<std::size_t> order;
  std::size_t r_offset = 0;
  std::size_t lambda_offset = 0;
  std::vector<std::size_t> theta_offset;
  std::vector<std::size_t> n_theta;
  std::size_t dim = 0;

  explicit StateLayout(const Scenario& scenario);

  std::span<const double> x(const Eigen::VectorXd& s, std::size_t i) const {
    return {s.data() + x_offset[i], order[i]};
  }
  std::span<const double> theta_hat(const Eigen::VectorXd& s,
                                    std::size_t i) const {
    return {s.data() + theta_offset[i], n_theta[i]};
  }
  // Agent that owns state component `index`.
  std::size_t agent_of(std::size_t index) const;
};

Eigen::VectorXd initial_state(const Scenario& scenario);

// Closed-loop composite of plants, certainty-equivalence controllers,
// adaptation laws and the optimal signal generator.
OdeSystem assemble(const Scenario& scenario);

// Time series for one agent, sampled on the trajectory grid. Vector-valued
// series are row-major (sample, component).
struct AgentSeries {
  std::size_t order = 0;
  std::size_t n_theta = 0;
  std::vector<double> x;
  std::vector<double> r;
  std::vector<double> lambda;
  std::vector<double> u;
  std::vector<double> theta_hat;

  // Derived from the raw series.
  std::vector<double> tracking_error;   // ||x_hat||
  std::vector<double> optimality_gap;   // |y - y*|
  std::vector<double> parameter_error;  // ||theta_hat - theta||

  std::span<const double> x_at(std::size_t k) const {
    return {x.data() + k * order, order};
  }
  std::span<const double> theta_hat_at(std::size_t k) const {
    return {theta_hat.data() + k * n_theta, n_theta};
  }
  double y(std::size_t k) const { return x[k * order]; }
};

struct Divergence {
  double time = 0.0;
  std::vector<std::size_t> agents;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<AgentSeries> agents;
  double y_star = 0.0;
  std::vector<Eigen::VectorXd> true_theta;
  std::vector<double> epsilon;
  std::optional<Divergence> divergence;

  std::size_t size() const { return times.size(); }
  bool diverged() const { return divergence.has_value(); }
  // Index of the last sample with time <= t (clamped to the grid).
  std::size_t index_at(double t) const;
};

// Appends one sample of every agent, evaluating u from the stacked state.
void record_sample(const Scenario& scenario, const StateLayout& layout,
                   double t, const Eigen::VectorXd& state, Trajectory& traj);

// Fills y*, true parameters and the derived series from the raw ones.
void compute_derived(const Scenario& scenario, double y_star, Trajectory& traj);

// Integrates the closed loop and records every `decimation`-th step plus the
// final step. A blow-up stops the run and is reported in `divergence`.
Trajectory run(const Scenario& scenario);

// Optimal signal generator alone (analytic gradients).
struct GeneratorTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> r;
  std::vector<Eigen::VectorXd> lambda;
};

OdeSystem generator_system(const CostSet& costs, const Topology& topology);
GeneratorTrajectory run_generator(const CostSet& costs,
                                  const Topology& topology,
                                  const Eigen::VectorXd& r0,
                                  const Eigen::VectorXd& lambda0,
                                  const IntegratorConfig& cfg,
                                  std::size_t decimation = 10);

// ---------------------------------------------------------------------------
// Persistence of excitation

// Running trapezoid integral of p p^T over a sampled grid. Window endpoints
// off the grid integrate the linear interpolant of p p^T exactly.
class CumulativeGram {
 public:
  // `samples` holds one row per time point.
  CumulativeGram(std::span<const double> times, const Eigen::MatrixXd& samples);

  std::size_t dim() const { return dim_; }
  // (1 / T0) * integral_t^{t+T0} p p^T.
  Eigen::MatrixXd window_average(double t, double window) const;

 private:
  Eigen::RowVectorXd integral_at(double t) const;

  std::vector<double> times_;
  std::size_t dim_;
  // Row k: packed upper triangle of p p^T at times_[k].
  Eigen::MatrixXd values_;
  // Row k: packed upper triangle of the integral from times_[0] to times_[k].
  Eigen::MatrixXd cumulative_;
};

struct AgentPeReport {
  std::vector<double> sample_times;
  std::vector<Eigen::MatrixXd> grams;
  std::vector<double> min_eig;
  double inf_min_eig = 0.0;
  bool persistently_excited = false;
  // inf over sampled t of the windowed mean of p_j^2.
  std::vector<double> component_inf;
  std::vector<bool> component_excited;
  double basis_sup = 0.0;
  bool basis_bounded = false;
};

struct PeReport {
  PeSettings settings;
  std::vector<AgentPeReport> agents;
};

// Evaluates each agent's basis along the trajectory and tests the window
// Gram condition for every stored t in [t0, t_end - T0]. Throws
// ValidationError when the trajectory is shorter than t0 + T0.
PeReport pe_monitor(const Trajectory& traj, const Scenario& scenario);

// ---------------------------------------------------------------------------
// Metrics

struct MetricsOptions {
  double band = 0.05;
  double tail_window = 2.0 * std::numbers::pi;
};

struct Summary {
  double t_final = 0.0;
  double y_star = 0.0;
  std::vector<double> final_gap;
  double max_final_gap = 0.0;
  // sup of |y_i - y*| over the trailing window.
  std::vector<double> tail_gap;
  double max_tail_gap = 0.0;
  double consensus_spread = 0.0;
  std::vector<double> final_tracking_error;
  double max_tracking_error = 0.0;
  std::vector<Eigen::VectorXd> parameter_error;  // |theta_hat_j - theta_j|
  // First time after which |y_i - y*| stays within the band.
  std::vector<std::optional<double>> time_to_band;
  double lambda_sum_drift = 0.0;
  double band = 0.0;
};

// Summary at the sample nearest `t` (defaults to the final sample). Throws
// ValidationError on a diverged trajectory.
Summary metrics(const Trajectory& traj, const MetricsOptions& opts = {});
Summary metrics_at(const Trajectory& traj, double t,
                   const MetricsOptions& opts = {});

// max_t |sum_i lambda_i(t) - sum_i lambda_i(0)|.
double lambda_sum_drift(const Trajectory& traj);

// Least-squares line through (t, log v).
struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LogLinearFit fit_log_linear(std::span<const double> times,
                            std::span<const double> values);

}  // namespace distopt
