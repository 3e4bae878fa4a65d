#include "distopt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

std::size_t packed_size(std::size_t dim) { return dim * (dim + 1) / 2; }

}  // namespace

CumulativeGram::CumulativeGram(std::span<const double> times,
                               const Eigen::MatrixXd& samples)
    : times_(times.begin(), times.end()),
      dim_(static_cast<std::size_t>(samples.cols())) {
  const auto n = static_cast<Eigen::Index>(times_.size());
  if (samples.rows() != n) {
    throw ValidationError("sample count differs from time grid");
  }
  if (n < 2) throw ValidationError("need at least two samples");
  const auto packed = static_cast<Eigen::Index>(packed_size(dim_));
  values_.resize(n, packed);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index c = 0;
    for (std::size_t a = 0; a < dim_; ++a) {
      for (std::size_t b = a; b < dim_; ++b) {
        values_(k, c++) = samples(k, static_cast<Eigen::Index>(a)) *
                          samples(k, static_cast<Eigen::Index>(b));
      }
    }
  }
  cumulative_ = Eigen::MatrixXd::Zero(n, packed);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double h = times_[k] - times_[k - 1];
    cumulative_.row(k) =
        cumulative_.row(k - 1) + 0.5 * h * (values_.row(k - 1) + values_.row(k));
  }
}

Eigen::RowVectorXd CumulativeGram::integral_at(double t) const {
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  if (t < times_.front() - slack || t > times_.back() + slack) {
    throw ValidationError("time " + std::to_string(t) +
                          " is outside the sampled range");
  }
  t = std::clamp(t, times_.front(), times_.back());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return cumulative_.row(cumulative_.rows() - 1);
  const auto k = static_cast<Eigen::Index>(it - times_.begin()) - 1;
  // Exact integral of the linear interpolant over [t_k, t].
  const double h = times_[k + 1] - times_[k];
  const double tau = t - times_[k];
  return cumulative_.row(k) + tau * values_.row(k) +
         (tau * tau / (2.0 * h)) * (values_.row(k + 1) - values_.row(k));
}

Eigen::MatrixXd CumulativeGram::window_average(double t, double window) const {
  if (!(window > 0.0)) throw ValidationError("window must be positive");
  const Eigen::RowVectorXd packed =
      (integral_at(t + window) - integral_at(t)) / window;
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd g(d, d);
  Eigen::Index c = 0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      g(a, b) = packed[c];
      g(b, a) = packed[c];
      ++c;
    }
  }
  return g;
}

PeReport pe_monitor(const Trajectory& traj, const Scenario& scenario) {
  const PeSettings& pe = scenario.pe;
  if (traj.size() < 2 ||
      traj.times.back() + 1e-9 < traj.times.front() + pe.start + pe.window) {
    throw ValidationError("PE window [t0, t0 + T0] is longer than the trajectory");
  }
  if (traj.agents.size() != scenario.size()) {
    throw ValidationError("trajectory and scenario disagree on agent count");
  }
  PeReport report;
  report.settings = pe;
  const double last_start = traj.times.back() - pe.window;
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const auto& series = traj.agents[i];
    const auto& basis = scenario.agents[i].basis;
    const auto m = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(traj.size()), m);
    AgentPeReport agent;
    agent.basis_bounded = true;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const Eigen::VectorXd p = basis.evaluate(series.x_at(k), traj.times[k]);
      samples.row(static_cast<Eigen::Index>(k)) = p.transpose();
      if (!p.allFinite()) {
        agent.basis_bounded = false;
      } else if (m > 0) {
        agent.basis_sup = std::max(agent.basis_sup, p.cwiseAbs().maxCoeff());
      }
    }
    if (agent.basis_sup > kDivergenceBound) agent.basis_bounded = false;

    const CumulativeGram gram(traj.times, samples);
    agent.inf_min_eig = std::numeric_limits<double>::infinity();
    agent.component_inf.assign(basis.dim(),
                               std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.times[k];
      if (t + 1e-9 < pe.start || t > last_start + 1e-9) continue;
      Eigen::MatrixXd g = gram.window_average(std::min(t, last_start), pe.window);
      const double lo = m > 0 ? min_eig_symmetric(g) : 0.0;
      agent.inf_min_eig = std::min(agent.inf_min_eig, lo);
      for (Eigen::Index j = 0; j < m; ++j) {
        agent.component_inf[static_cast<std::size_t>(j)] =
            std::min(agent.component_inf[static_cast<std::size_t>(j)], g(j, j));
      }
      agent.sample_times.push_back(t);
      agent.min_eig.push_back(lo);
      agent.grams.push_back(std::move(g));
    }
    agent.persistently_excited = agent.inf_min_eig >= pe.floor;
    for (double v : agent.component_inf) {
      agent.component_excited.push_back(v >= pe.floor);
    }
    report.agents.push_back(std::move(agent));
  }
  return report;
}

}  // namespace distopt
