#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace distopt {

// Autonomous-or-not first-order system  dx/dt = rhs(t, x).
struct OdeSystem {
  std::size_t dim = 0;
  std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt)>
      rhs;
};

// Fixed-step classical RK4 from t = 0 to t_end.
struct IntegratorConfig {
  double step = 1e-3;
  double t_end = 50.0;
  // Abort when any component exceeds this magnitude. Non-finite values always
  // abort.
  double divergence_bound = std::numeric_limits<double>::infinity();

  // Number of steps; the last step is shortened so the run ends at t_end.
  std::size_t steps() const;
  void validate() const;
};

// Called with (step index, t, state) at t = 0 and after every step.
using StepObserver =
    std::function<void(std::size_t step, double t, const Eigen::VectorXd& x)>;

// Throws DivergenceError carrying the blow-up time and offending indices.
Eigen::VectorXd integrate(const OdeSystem& sys, const Eigen::VectorXd& x0,
                          const IntegratorConfig& cfg,
                          const StepObserver& observer = {});

bool is_hurwitz(const Eigen::MatrixXd& a);
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a);

// Smallest eigenvalue of a symmetric matrix. Throws ValidationError when
// |M - M^T| exceeds 1e-10.
double min_eig_symmetric(const Eigen::MatrixXd& m);

}  // namespace distopt
