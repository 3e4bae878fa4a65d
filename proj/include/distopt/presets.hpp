#pragma once

#include "distopt/sim.hpp"

namespace distopt {

// Four-node example graph: unit edges 1-2, 2-3, 3-4, 1-3.
Topology paper_topology();

// Initial plant states used by the bundled Van der Pol scenario.
std::vector<Eigen::VectorXd> paper_initial_plant_states();

// Four Van der Pol agents (a = b = 1, v(0) = (1, 0)) on the example graph with
// the four example costs, poles at -2, Lambda = 10 I.
Scenario paper_vdp_scenario(AdaptiveVariant variant = AdaptiveVariant::kOnline,
                            double epsilon = 0.2, double sigma = 0.05);

// Fills r(0) = x_1(0), lambda(0) = 0, theta_hat(0) = 0 for every agent whose
// initial state has only x set.
void default_controller_initial_state(Scenario& scenario);

}  // namespace distopt
