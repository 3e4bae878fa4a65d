#include "distopt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

std::string agent_label(std::size_t i) {
  return "agent " + std::to_string(i + 1);
}

}  // namespace

void Scenario::validate() const {
  const std::size_t n = agents.size();
  if (n == 0) throw ValidationError("scenario has no agents");
  if (topology.size() != n) {
    throw ValidationError("graph has " + std::to_string(topology.size()) +
                          " nodes but the scenario has " + std::to_string(n) +
                          " agents");
  }
  if (costs.size() != n || controllers.size() != n || initial.size() != n) {
    throw ValidationError(
        "costs, controllers and initial states must have one entry per agent");
  }
  if (!is_connected(topology)) {
    throw ValidationError(
        "graph connectivity assumption violated: the information-sharing "
        "graph is not connected");
  }
  integrator.validate();
  if (decimation == 0) throw ValidationError("decimation must be at least 1");
  if (!(pe.window > 0.0)) throw ValidationError("PE window must be positive");
  if (!(pe.start >= 0.0)) throw ValidationError("PE start must be nonnegative");
  if (!(pe.floor > 0.0)) throw ValidationError("PE floor must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    try {
      agents[i].validate();
      controllers[i].gains.validate();
      controllers[i].law.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(agent_label(i) + ": " + e.what());
    }
    if (controllers[i].gains.order() != agents[i].order) {
      throw ValidationError(agent_label(i) +
                            ": gain vector length differs from agent order");
    }
    if (static_cast<std::size_t>(controllers[i].law.gain.rows()) !=
        agents[i].n_theta()) {
      throw ValidationError(agent_label(i) +
                            ": adaptation gain size differs from basis size");
    }
    if (static_cast<std::size_t>(initial[i].x.size()) != agents[i].order) {
      throw ValidationError(agent_label(i) +
                            ": initial state length differs from agent order");
    }
    if (static_cast<std::size_t>(initial[i].theta_hat.size()) !=
        agents[i].n_theta()) {
      throw ValidationError(agent_label(i) +
                            ": initial estimate length differs from basis size");
    }
  }
}

std::vector<std::string> Scenario::warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    const double eps = controllers[i].gains.epsilon;
    if (integrator.step > eps * eps / 10.0) {
      out.push_back(agent_label(i) + ": step " +
                    std::to_string(integrator.step) +
                    " exceeds epsilon^2/10 = " + std::to_string(eps * eps / 10.0));
    }
  }
  return out;
}

StateLayout::StateLayout(const Scenario& scenario) {
  const std::size_t n = scenario.size();
  std::size_t offset = 0;
  for (const auto& a : scenario.agents) {
    x_offset.push_back(offset);
    order.push_back(a.order);
    offset += a.order;
  }
  r_offset = offset;
  lambda_offset = offset + n;
  offset += 2 * n;
  for (const auto& a : scenario.agents) {
    theta_offset.push_back(offset);
    n_theta.push_back(a.n_theta());
    offset += a.n_theta();
  }
  dim = offset;
}

std::size_t StateLayout::agent_of(std::size_t index) const {
  const std::size_t n = order.size();
  if (index >= r_offset && index < lambda_offset + n) {
    return index < lambda_offset ? index - r_offset : index - lambda_offset;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (index >= x_offset[i] && index < x_offset[i] + order[i]) return i;
    if (index >= theta_offset[i] && index < theta_offset[i] + n_theta[i]) {
      return i;
    }
  }
  throw std::out_of_range("state index beyond layout");
}

Eigen::VectorXd initial_state(const Scenario& scenario) {
  const StateLayout layout(scenario);
  Eigen::VectorXd s(static_cast<Eigen::Index>(layout.dim));
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const auto& init = scenario.initial[i];
    s.segment(static_cast<Eigen::Index>(layout.x_offset[i]), init.x.size()) =
        init.x;
    s[static_cast<Eigen::Index>(layout.r_offset + i)] = init.r;
    s[static_cast<Eigen::Index>(layout.lambda_offset + i)] = init.lambda;
    s.segment(static_cast<Eigen::Index>(layout.theta_offset[i]),
              init.theta_hat.size()) = init.theta_hat;
  }
  return s;
}

OdeSystem assemble(const Scenario& scenario) {
  scenario.validate();
  const StateLayout layout(scenario);
  const Eigen::MatrixXd lap = laplacian(scenario.topology);
  const std::size_t n = scenario.size();
  const std::size_t max_theta =
      *std::max_element(layout.n_theta.begin(), layout.n_theta.end());

  // Captures by value so the system outlives the scenario reference.
  auto rhs = [scenario, layout, lap, n, max_theta](
                 double t, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    std::vector<double> p(max_theta);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = s[layout.x_offset[i]];

    const std::span<const double> r(s.data() + layout.r_offset, n);
    const std::span<const double> lambda(s.data() + layout.lambda_offset, n);

    // Generator: each agent's gradient source follows its adaptation law.
    std::vector<double> r_meas(n), lam_dot(n), r_an(n);
    generator_rhs(scenario.costs, lap, r, lambda, GradientSource::kMeasured, y,
                  r_meas, lam_dot);
    bool any_analytic = false;
    for (const auto& c : scenario.controllers) {
      any_analytic |= c.law.gradient_source() == GradientSource::kAnalytic;
    }
    if (any_analytic) {
      generator_rhs(scenario.costs, lap, r, lambda, GradientSource::kAnalytic,
                    y, r_an, lam_dot);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool analytic = scenario.controllers[i].law.gradient_source() ==
                            GradientSource::kAnalytic;
      ds[layout.r_offset + i] = analytic ? r_an[i] : r_meas[i];
      ds[layout.lambda_offset + i] = lam_dot[i];
    }

    for (std::size_t i = 0; i < n; ++i) {
      const auto& agent = scenario.agents[i];
      const auto& ctrl = scenario.controllers[i];
      const auto x = layout.x(s, i);
      const auto theta_hat = layout.theta_hat(s, i);
      const std::span<double> pi(p.data(), agent.n_theta());
      agent.basis.evaluate(x, t, pi);

      const double u = control_input(ctrl.gains, x, r[i], theta_hat, pi);
      const std::size_t xo = layout.x_offset[i];
      const std::size_t order = agent.order;
      for (std::size_t j = 0; j + 1 < order; ++j) ds[xo + j] = x[j + 1];
      double delta = 0.0;
      for (std::size_t j = 0; j < pi.size(); ++j) {
        delta += agent.true_theta[static_cast<Eigen::Index>(j)] * pi[j];
      }
      ds[xo + order - 1] = delta + u;

      const Eigen::VectorXd x_hat = error_transform(x, r[i], ctrl.gains.epsilon);
      adaptation_rhs(ctrl.law, ctrl.gains, pi,
                     std::span(x_hat.data(), order), theta_hat,
                     std::span(ds.data() + layout.theta_offset[i],
                               agent.n_theta()));
    }
  };
  return OdeSystem{layout.dim, std::move(rhs)};
}

std::size_t Trajectory::index_at(double t) const {
  if (times.empty()) throw std::out_of_range("trajectory is empty");
  // Tolerate grid times that differ from t by rounding.
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  auto it = std::upper_bound(times.begin(), times.end(), t + slack);
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
}

void record_sample(const Scenario& scenario, const StateLayout& layout,
                   double t, const Eigen::VectorXd& state, Trajectory& traj) {
  if (traj.agents.size() != scenario.size()) {
    traj.agents.assign(scenario.size(), AgentSeries{});
    for (std::size_t i = 0; i < scenario.size(); ++i) {
      traj.agents[i].order = layout.order[i];
      traj.agents[i].n_theta = layout.n_theta[i];
    }
  }
  traj.times.push_back(t);
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    auto& series = traj.agents[i];
    const auto x = layout.x(state, i);
    const auto theta_hat = layout.theta_hat(state, i);
    const double r = state[static_cast<Eigen::Index>(layout.r_offset + i)];
    const Eigen::VectorXd p = scenario.agents[i].basis.evaluate(x, t);
    series.x.insert(series.x.end(), x.begin(), x.end());
    series.r.push_back(r);
    series.lambda.push_back(
        state[static_cast<Eigen::Index>(layout.lambda_offset + i)]);
    series.u.push_back(control_input(scenario.controllers[i].gains, x, r,
                                     theta_hat,
                                     std::span(p.data(), layout.n_theta[i])));
    series.theta_hat.insert(series.theta_hat.end(), theta_hat.begin(),
                            theta_hat.end());
  }
}

void compute_derived(const Scenario& scenario, double y_star,
                     Trajectory& traj) {
  traj.y_star = y_star;
  traj.true_theta.clear();
  traj.epsilon.clear();
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    traj.true_theta.push_back(scenario.agents[i].true_theta);
    traj.epsilon.push_back(scenario.controllers[i].gains.epsilon);
  }
  for (std::size_t i = 0; i < traj.agents.size(); ++i) {
    auto& series = traj.agents[i];
    const std::size_t samples = series.r.size();
    series.tracking_error.resize(samples);
    series.optimality_gap.resize(samples);
    series.parameter_error.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      const auto x = series.x_at(k);
      series.tracking_error[k] =
          error_transform(x, series.r[k], traj.epsilon[i]).norm();
      series.optimality_gap[k] = std::abs(x[0] - y_star);
      const auto th = series.theta_hat_at(k);
      double sq = 0.0;
      for (std::size_t j = 0; j < th.size(); ++j) {
        const double d = th[j] - traj.true_theta[i][static_cast<Eigen::Index>(j)];
        sq += d * d;
      }
      series.parameter_error[k] = std::sqrt(sq);
    }
  }
}

Trajectory run(const Scenario& scenario) {
  const OdeSystem sys = assemble(scenario);
  const StateLayout layout(scenario);
  const double y_star =
      minimize_global(scenario.costs, scenario.optimum_bracket, 1e-12);
  const std::size_t last_step = scenario.integrator.steps();

  Trajectory traj;
  const auto observer = [&](std::size_t step, double t,
                            const Eigen::VectorXd& state) {
    if (step % scenario.decimation == 0 || step == last_step) {
      record_sample(scenario, layout, t, state, traj);
    }
  };
  try {
    integrate(sys, initial_state(scenario), scenario.integrator, observer);
  } catch (const DivergenceError& e) {
    Divergence d;
    d.time = e.blowup_time();
    for (std::size_t c : e.components()) {
      const std::size_t agent = layout.agent_of(c);
      if (std::find(d.agents.begin(), d.agents.end(), agent) == d.agents.end()) {
        d.agents.push_back(agent);
      }
    }
    std::sort(d.agents.begin(), d.agents.end());
    traj.divergence = std::move(d);
  }
  compute_derived(scenario, y_star, traj);
  return traj;
}

OdeSystem generator_system(const CostSet& costs, const Topology& topology) {
  if (costs.size() != topology.size()) {
    throw ValidationError("one cost per graph node is required");
  }
  const std::size_t n = costs.size();
  const Eigen::MatrixXd lap = laplacian(topology);
  auto rhs = [costs, lap, n](double, const Eigen::VectorXd& s,
                             Eigen::VectorXd& ds) {
    generator_rhs(costs, lap, std::span(s.data(), n),
                  std::span(s.data() + n, n), GradientSource::kAnalytic, {},
                  std::span(ds.data(), n), std::span(ds.data() + n, n));
  };
  return OdeSystem{2 * n, std::move(rhs)};
}

GeneratorTrajectory run_generator(const CostSet& costs,
                                  const Topology& topology,
                                  const Eigen::VectorXd& r0,
                                  const Eigen::VectorXd& lambda0,
                                  const IntegratorConfig& cfg,
                                  std::size_t decimation) {
  const std::size_t n = costs.size();
  if (static_cast<std::size_t>(r0.size()) != n ||
      static_cast<std::size_t>(lambda0.size()) != n) {
    throw ValidationError("generator initial state has the wrong size");
  }
  if (decimation == 0) throw ValidationError("decimation must be at least 1");
  const OdeSystem sys = generator_system(costs, topology);
  Eigen::VectorXd s0(static_cast<Eigen::Index>(2 * n));
  s0 << r0, lambda0;
  const std::size_t last_step = cfg.steps();
  GeneratorTrajectory out;
  integrate(sys, s0, cfg,
            [&](std::size_t step, double t, const Eigen::VectorXd& s) {
              if (step % decimation == 0 || step == last_step) {
                out.times.push_back(t);
                out.r.push_back(s.head(static_cast<Eigen::Index>(n)));
                out.lambda.push_back(s.tail(static_cast<Eigen::Index>(n)));
              }
            });
  return out;
}

}  // namespace distopt
