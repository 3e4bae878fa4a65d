#include "distopt/sim.hpp"

#include <algorithm>
#include <cmath>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

double lambda_sum(const Trajectory& traj, std::size_t k) {
  double s = 0.0;
  for (const auto& a : traj.agents) s += a.lambda[k];
  return s;
}

double lambda_drift_until(const Trajectory& traj, std::size_t last) {
  const double base = lambda_sum(traj, 0);
  double drift = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    drift = std::max(drift, std::abs(lambda_sum(traj, k) - base));
  }
  return drift;
}

}  // namespace

double lambda_sum_drift(const Trajectory& traj) {
  if (traj.size() == 0) return 0.0;
  return lambda_drift_until(traj, traj.size() - 1);
}

Summary metrics(const Trajectory& traj, const MetricsOptions& opts) {
  if (traj.size() == 0) throw ValidationError("trajectory is empty");
  return metrics_at(traj, traj.times.back(), opts);
}

Summary metrics_at(const Trajectory& traj, double t,
                   const MetricsOptions& opts) {
  if (traj.diverged()) {
    throw ValidationError("metrics need a trajectory that did not diverge");
  }
  if (traj.size() == 0) throw ValidationError("trajectory is empty");
  const std::size_t last = traj.index_at(t);
  const double t_final = traj.times[last];
  const std::size_t first_tail = traj.index_at(t_final - opts.tail_window);

  Summary s;
  s.t_final = t_final;
  s.y_star = traj.y_star;
  s.band = opts.band;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (std::size_t i = 0; i < traj.agents.size(); ++i) {
    const auto& a = traj.agents[i];
    const double gap = a.optimality_gap[last];
    s.final_gap.push_back(gap);
    s.max_final_gap = std::max(s.max_final_gap, gap);

    double tail = 0.0;
    for (std::size_t k = first_tail; k <= last; ++k) {
      tail = std::max(tail, a.optimality_gap[k]);
    }
    s.tail_gap.push_back(tail);
    s.max_tail_gap = std::max(s.max_tail_gap, tail);

    y_min = std::min(y_min, a.y(last));
    y_max = std::max(y_max, a.y(last));

    s.final_tracking_error.push_back(a.tracking_error[last]);
    s.max_tracking_error = std::max(s.max_tracking_error, a.tracking_error[last]);

    const auto th = a.theta_hat_at(last);
    Eigen::VectorXd err(static_cast<Eigen::Index>(th.size()));
    for (std::size_t j = 0; j < th.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      err[jj] = std::abs(th[j] - traj.true_theta[i][jj]);
    }
    s.parameter_error.push_back(std::move(err));

    // Last excursion outside the band decides the entry time.
    std::optional<double> entry;
    if (a.optimality_gap[last] <= opts.band) {
      entry = traj.times[0];
      for (std::size_t k = last + 1; k-- > 0;) {
        if (a.optimality_gap[k] > opts.band) {
          entry = traj.times[k + 1];
          break;
        }
      }
    }
    s.time_to_band.push_back(entry);
  }
  s.consensus_spread = y_max - y_min;
  s.lambda_sum_drift = lambda_drift_until(traj, last);
  return s;
}

LogLinearFit fit_log_linear(std::span<const double> times,
                            std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ValidationError("log-linear fit needs at least two paired samples");
  }
  const auto n = static_cast<double>(times.size());
  double st = 0.0, sl = 0.0;
  std::vector<double> logs(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) {
      throw ValidationError("log-linear fit needs positive values");
    }
    logs[k] = std::log(values[k]);
    st += times[k];
    sl += logs[k];
  }
  const double t_mean = st / n, l_mean = sl / n;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - t_mean, dl = logs[k] - l_mean;
    stt += dt * dt;
    stl += dt * dl;
    sll += dl * dl;
  }
  LogLinearFit fit;
  fit.slope = stl / stt;
  fit.intercept = l_mean - fit.slope * t_mean;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double e = logs[k] - (fit.intercept + fit.slope * times[k]);
    ss_res += e * e;
  }
  fit.r_squared = sll > 0.0 ? 1.0 - ss_res / sll : 1.0;
  return fit;
}

}  // namespace distopt
