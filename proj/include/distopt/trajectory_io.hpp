#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "distopt/sim.hpp"

namespace distopt {

// Columns: t,agent,x1..xn,y,r,lambda,u,theta_hat_1..m with n and m the
// largest order and basis size; shorter agents leave trailing cells empty.
// Values are written with 17 significant digits so they re-read exactly.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

// Rebuilds the raw series and recomputes the derived ones against the
// scenario that produced the file.
Trajectory read_trajectory_csv(std::istream& in, const Scenario& scenario);

// Flat `key = value` lines.
void write_metrics(std::ostream& out, const Summary& summary);
void write_pe_report(std::ostream& out, const PeReport& report);

// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace distopt
