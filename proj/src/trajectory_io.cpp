#include "distopt/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("trajectory csv line " + std::to_string(line) +
                  ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  std::size_t max_order = 0, max_theta = 0;
  for (const auto& a : traj.agents) {
    max_order = std::max(max_order, a.order);
    max_theta = std::max(max_theta, a.n_theta);
  }
  out << "t,agent";
  for (std::size_t j = 1; j <= max_order; ++j) out << ",x" << j;
  out << ",y,r,lambda,u";
  for (std::size_t j = 1; j <= max_theta; ++j) out << ",theta_hat_" << j;
  out << '\n';

  for (std::size_t k = 0; k < traj.size(); ++k) {
    for (std::size_t i = 0; i < traj.agents.size(); ++i) {
      const auto& a = traj.agents[i];
      out << fmt(traj.times[k]) << ',' << (i + 1);
      const auto x = a.x_at(k);
      for (std::size_t j = 0; j < max_order; ++j) {
        out << ',';
        if (j < x.size()) out << fmt(x[j]);
      }
      out << ',' << fmt(a.y(k)) << ',' << fmt(a.r[k]) << ','
          << fmt(a.lambda[k]) << ',' << fmt(a.u[k]);
      const auto th = a.theta_hat_at(k);
      for (std::size_t j = 0; j < max_theta; ++j) {
        out << ',';
        if (j < th.size()) out << fmt(th[j]);
      }
      out << '\n';
    }
  }
}

Trajectory read_trajectory_csv(std::istream& in, const Scenario& scenario) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trajectory csv is empty");
  const auto header = split_csv(line);
  std::size_t max_order = 0, max_theta = 0;
  for (const auto& h : header) {
    if (h.size() > 1 && h[0] == 'x') ++max_order;
    if (h.rfind("theta_hat_", 0) == 0) ++max_theta;
  }
  const std::size_t columns = 2 + max_order + 4 + max_theta;
  if (header.size() != columns || header[0] != "t" || header[1] != "agent") {
    throw IoError("trajectory csv has an unexpected header");
  }

  const std::size_t n = scenario.size();
  Trajectory traj;
  traj.agents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    traj.agents[i].order = scenario.agents[i].order;
    traj.agents[i].n_theta = scenario.agents[i].n_theta();
    if (traj.agents[i].order > max_order || traj.agents[i].n_theta > max_theta) {
      throw IoError("trajectory csv does not match the scenario dimensions");
    }
  }

  std::size_t line_no = 1;
  std::size_t expected_agent = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != columns) {
      throw IoError("trajectory csv line " + std::to_string(line_no) +
                    ": expected " + std::to_string(columns) + " cells");
    }
    const double t = parse_double(cells[0], line_no);
    const auto agent = static_cast<std::size_t>(parse_double(cells[1], line_no));
    if (agent != expected_agent + 1) {
      throw IoError("trajectory csv line " + std::to_string(line_no) +
                    ": rows out of agent order");
    }
    if (expected_agent == 0) traj.times.push_back(t);
    auto& a = traj.agents[expected_agent];
    for (std::size_t j = 0; j < a.order; ++j) {
      a.x.push_back(parse_double(cells[2 + j], line_no));
    }
    const std::size_t base = 2 + max_order;
    a.r.push_back(parse_double(cells[base + 1], line_no));
    a.lambda.push_back(parse_double(cells[base + 2], line_no));
    a.u.push_back(parse_double(cells[base + 3], line_no));
    for (std::size_t j = 0; j < a.n_theta; ++j) {
      a.theta_hat.push_back(parse_double(cells[base + 4 + j], line_no));
    }
    expected_agent = (expected_agent + 1) % n;
  }
  if (expected_agent != 0) throw IoError("trajectory csv ends mid-sample");

  const double y_star =
      minimize_global(scenario.costs, scenario.optimum_bracket, 1e-12);
  compute_derived(scenario, y_star, traj);
  return traj;
}

void write_metrics(std::ostream& out, const Summary& s) {
  out << "t_final = " << fmt(s.t_final) << '\n'
      << "y_star = " << fmt(s.y_star) << '\n'
      << "band = " << fmt(s.band) << '\n'
      << "max_final_gap = " << fmt(s.max_final_gap) << '\n'
      << "max_tail_gap = " << fmt(s.max_tail_gap) << '\n'
      << "consensus_spread = " << fmt(s.consensus_spread) << '\n'
      << "max_tracking_error = " << fmt(s.max_tracking_error) << '\n'
      << "lambda_sum_drift = " << fmt(s.lambda_sum_drift) << '\n';
  for (std::size_t i = 0; i < s.final_gap.size(); ++i) {
    const std::string p = "agent." + std::to_string(i + 1) + ".";
    out << p << "final_gap = " << fmt(s.final_gap[i]) << '\n'
        << p << "tail_gap = " << fmt(s.tail_gap[i]) << '\n'
        << p << "tracking_error = " << fmt(s.final_tracking_error[i]) << '\n'
        << p << "time_to_band = "
        << (s.time_to_band[i] ? fmt(*s.time_to_band[i]) : std::string("none"))
        << '\n';
    for (Eigen::Index j = 0; j < s.parameter_error[i].size(); ++j) {
      out << p << "theta_error." << (j + 1) << " = "
          << fmt(s.parameter_error[i][j]) << '\n';
    }
  }
}

void write_pe_report(std::ostream& out, const PeReport& report) {
  out << "window = " << fmt(report.settings.window) << '\n'
      << "start = " << fmt(report.settings.start) << '\n'
      << "floor = " << fmt(report.settings.floor) << '\n';
  for (std::size_t i = 0; i < report.agents.size(); ++i) {
    const auto& a = report.agents[i];
    const std::string p = "agent." + std::to_string(i + 1) + ".";
    out << p << "inf_min_eig = " << fmt(a.inf_min_eig) << '\n'
        << p << "persistently_excited = "
        << (a.persistently_excited ? "true" : "false") << '\n'
        << p << "basis_sup = " << fmt(a.basis_sup) << '\n'
        << p << "basis_bounded = " << (a.basis_bounded ? "true" : "false")
        << '\n';
    for (std::size_t j = 0; j < a.component_inf.size(); ++j) {
      const std::string c = p + "component." + std::to_string(j + 1) + ".";
      out << c << "inf_mean_square = " << fmt(a.component_inf[j]) << '\n'
          << c << "excited = " << (a.component_excited[j] ? "true" : "false")
          << '\n';
    }
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

}  // namespace distopt
