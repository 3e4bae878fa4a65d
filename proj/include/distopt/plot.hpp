#pragma once

#include <string>
#include <vector>

#include "distopt/sim.hpp"

namespace distopt {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Stacks panels vertically in one standalone SVG document.
std::string render_svg(const std::vector<PlotPanel>& panels,
                       double panel_width = 640.0,
                       double panel_height = 300.0);

// Outputs y_i(t) against the optimum.
PlotPanel outputs_panel(const Trajectory& traj);
// theta_hat_{j,i}(t) for all agents, with the true values dashed.
PlotPanel estimate_panel(const Trajectory& traj, std::size_t component);

}  // namespace distopt
