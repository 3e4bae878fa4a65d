#include "distopt/presets.hpp"

namespace distopt {

Topology paper_topology() {
  return Topology::from_edges(
      4, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {1, 3, 1.0}});
}

std::vector<Eigen::VectorXd> paper_initial_plant_states() {
  return {
      Eigen::Vector2d(2.0, 0.0),
      Eigen::Vector2d(-1.0, 1.0),
      Eigen::Vector2d(4.0, -1.0),
      Eigen::Vector2d(0.5, 0.0),
  };
}

void default_controller_initial_state(Scenario& scenario) {
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    auto& init = scenario.initial[i];
    init.r = init.x[0];
    init.lambda = 0.0;
    init.theta_hat =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scenario.agents[i].n_theta()));
  }
}

Scenario paper_vdp_scenario(AdaptiveVariant variant, double epsilon,
                            double sigma) {
  Scenario s;
  s.name = "paper_vdp";
  s.topology = paper_topology();
  s.costs = paper_costs();
  const Exosystem exo;  // D = [1 0], S = [0 1; -1 0], v(0) = (1, 0)
  const auto x0 = paper_initial_plant_states();
  for (std::size_t i = 0; i < 4; ++i) {
    s.agents.push_back(vdp_preset(1.0, 1.0, exo));
    s.controllers.push_back(
        {GainSet::with_default_poles(2, epsilon),
         AdaptiveLaw::make(variant, 4, /*lambda_gain=*/10.0, sigma)});
    s.initial.push_back({x0[i], 0.0, 0.0, {}});
  }
  default_controller_initial_state(s);
  return s;
}

}  // namespace distopt
