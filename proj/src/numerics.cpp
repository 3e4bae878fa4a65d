#include "distopt/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "distopt/errors.hpp"

namespace distopt {

std::size_t IntegratorConfig::steps() const {
  return static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ValidationError("integrator step must be positive");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw ValidationError("integrator t_end must be positive");
  }
  if (t_end / step >
      static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2)) {
    throw ValidationError("t_end / step does not fit in a step counter");
  }
}

namespace {

// Indices of components that are non-finite or beyond the bound.
std::vector<std::size_t> bad_components(const Eigen::VectorXd& x,
                                        double bound) {
  std::vector<std::size_t> bad;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || std::abs(x[i]) > bound) {
      bad.push_back(static_cast<std::size_t>(i));
    }
  }
  return bad;
}

}  // namespace

Eigen::VectorXd integrate(const OdeSystem& sys, const Eigen::VectorXd& x0,
                          const IntegratorConfig& cfg,
                          const StepObserver& observer) {
  cfg.validate();
  if (static_cast<std::size_t>(x0.size()) != sys.dim) {
    throw ValidationError("initial state has " + std::to_string(x0.size()) +
                          " components, system expects " +
                          std::to_string(sys.dim));
  }
  Eigen::VectorXd x = x0;
  if (observer) observer(0, 0.0, x);

  // Work buffers reused across steps.
  Eigen::VectorXd k1(sys.dim), k2(sys.dim), k3(sys.dim), k4(sys.dim),
      tmp(sys.dim);
  const std::size_t n = cfg.steps();
  for (std::size_t s = 0; s < n; ++s) {
    // Times are computed from the index so long runs do not accumulate drift.
    const double t = static_cast<double>(s) * cfg.step;
    const double h = (s + 1 == n) ? cfg.t_end - t : cfg.step;
    sys.rhs(t, x, k1);
    tmp.noalias() = x + (0.5 * h) * k1;
    sys.rhs(t + 0.5 * h, tmp, k2);
    tmp.noalias() = x + (0.5 * h) * k2;
    sys.rhs(t + 0.5 * h, tmp, k3);
    tmp.noalias() = x + h * k3;
    sys.rhs(t + h, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = (s + 1 == n) ? cfg.t_end : t + h;
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > cfg.divergence_bound) {
      throw DivergenceError(
          "integration diverged at t = " + std::to_string(t_next), t_next,
          bad_components(x, cfg.divergence_bound));
    }
    if (observer) observer(s + 1, t_next, x);
  }
  return x;
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

bool is_hurwitz(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return false;
  return eigenvalues(a).real().maxCoeff() < -1e-10;
}

double min_eig_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix must be square");
  if (m.size() == 0) throw ValidationError("matrix is empty");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigenvalue iteration failed");
  }
  return solver.eigenvalues().minCoeff();
}

}  // namespace distopt
