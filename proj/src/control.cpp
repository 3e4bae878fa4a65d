#include "distopt/control.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "distopt/errors.hpp"
#include "distopt/numerics.hpp"

namespace distopt {

Eigen::VectorXd design_gains(std::size_t order,
                             const std::vector<std::complex<double>>& roots) {
  if (order == 0) throw ValidationError("order must be at least 1");
  if (roots.size() != order) {
    throw ValidationError("expected " + std::to_string(order) +
                          " poles, got " + std::to_string(roots.size()));
  }
  for (const auto& rho : roots) {
    if (!(rho.real() < 0.0)) {
      throw ValidationError("pole " + std::to_string(rho.real()) + "+" +
                            std::to_string(rho.imag()) +
                            "i is not in the open left half-plane");
    }
  }
  // Conjugate closure: every complex pole needs its own conjugate partner.
  std::vector<bool> used(roots.size(), false);
  for (std::size_t a = 0; a < roots.size(); ++a) {
    const double tol = 1e-9 * std::max(1.0, std::abs(roots[a]));
    if (used[a] || std::abs(roots[a].imag()) <= tol) continue;
    used[a] = true;
    bool matched = false;
    for (std::size_t b = 0; b < roots.size() && !matched; ++b) {
      if (!used[b] && std::abs(roots[b] - std::conj(roots[a])) <= tol) {
        used[b] = true;
        matched = true;
      }
    }
    if (!matched) throw ValidationError("poles are not closed under conjugation");
  }

  // coeffs[j] multiplies s^j; monic.
  std::vector<std::complex<double>> coeffs{1.0};
  for (const auto& rho : roots) {
    std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      next[j + 1] += coeffs[j];
      next[j] -= rho * coeffs[j];
    }
    coeffs = std::move(next);
  }
  Eigen::VectorXd k(static_cast<Eigen::Index>(order));
  for (std::size_t j = 0; j < order; ++j) {
    k[static_cast<Eigen::Index>(j)] = -coeffs[j].real();
  }
  return k;
}

Eigen::MatrixXd companion(const Eigen::VectorXd& k) {
  const auto n = k.size();
  if (n == 0) throw ValidationError("gain vector is empty");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  if (n > 1) a.topRightCorner(n - 1, n - 1).setIdentity();
  a.row(n - 1) = k.transpose();
  return a;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.size() == 0) {
    throw ValidationError("Lyapunov equation needs a nonempty square matrix");
  }
  if (!is_hurwitz(a)) {
    throw ValidationError("matrix is not Hurwitz; Lyapunov equation has no "
                          "positive definite solution");
  }
  const auto n = a.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  // Column-major vec: vec(A^T P) = (I (x) A^T) vec P, vec(P A) = (A^T (x) I) vec P.
  const Eigen::MatrixXd m = Eigen::kroneckerProduct(id, a.transpose()) +
                            Eigen::kroneckerProduct(a.transpose(), id);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd rhs = -2.0 * id;
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n * n);

  Eigen::VectorXd p = lu.solve(b);
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Eigen::VectorXd residual = b - m * p;
    p += lu.solve(residual);
  }
  Eigen::MatrixXd out = Eigen::Map<Eigen::MatrixXd>(p.data(), n, n);
  return 0.5 * (out + out.transpose());
}

GainSet GainSet::design(std::size_t order,
                        const std::vector<std::complex<double>>& poles,
                        double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive");
  }
  GainSet g;
  g.k = design_gains(order, poles);
  g.epsilon = epsilon;
  g.A = companion(g.k);
  g.P = solve_lyapunov(g.A);
  g.validate();
  return g;
}

GainSet GainSet::with_default_poles(std::size_t order, double epsilon) {
  return design(order, std::vector<std::complex<double>>(order, -2.0), epsilon);
}

void GainSet::validate() const {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const auto n = k.size();
  if (n == 0 || A.rows() != n || A.cols() != n || P.rows() != n ||
      P.cols() != n) {
    throw ValidationError("gain set dimensions are inconsistent");
  }
  if (A != companion(k)) {
    throw ValidationError("closed-loop matrix does not match the gains");
  }
  if (!is_hurwitz(A)) {
    throw ValidationError("feedback gains do not give a Hurwitz polynomial");
  }
  const Eigen::MatrixXd residual =
      A.transpose() * P + P * A + 2.0 * Eigen::MatrixXd::Identity(n, n);
  if (residual.cwiseAbs().rowwise().sum().maxCoeff() > 1e-9) {
    throw ValidationError("Lyapunov residual exceeds 1e-9");
  }
  if (!(min_eig_symmetric(P) > 0.0)) {
    throw ValidationError("Lyapunov matrix is not positive definite");
  }
}

AdaptiveVariant parse_variant(const std::string& name) {
  if (name == "online") return AdaptiveVariant::kOnline;
  if (name == "offline") return AdaptiveVariant::kOffline;
  if (name == "sigma_mod") return AdaptiveVariant::kSigmaMod;
  throw ValidationError("unknown controller variant '" + name +
                        "' (expected online, offline or sigma_mod)");
}

const char* to_string(AdaptiveVariant variant) {
  switch (variant) {
    case AdaptiveVariant::kOnline: return "online";
    case AdaptiveVariant::kOffline: return "offline";
    case AdaptiveVariant::kSigmaMod: return "sigma_mod";
  }
  return "unknown";
}

AdaptiveLaw AdaptiveLaw::make(AdaptiveVariant variant, std::size_t n_theta,
                              double lambda_gain, double sigma) {
  AdaptiveLaw law;
  law.variant = variant;
  const auto n = static_cast<Eigen::Index>(n_theta);
  law.gain = lambda_gain * Eigen::MatrixXd::Identity(n, n);
  law.sigma = variant == AdaptiveVariant::kSigmaMod ? sigma : 0.0;
  law.validate();
  return law;
}

void AdaptiveLaw::validate() const {
  if (gain.rows() != gain.cols()) {
    throw ValidationError("adaptation gain must be square");
  }
  if (gain.size() > 0 && !(min_eig_symmetric(gain) > 0.0)) {
    throw ValidationError("adaptation gain must be positive definite");
  }
  if (variant == AdaptiveVariant::kSigmaMod && !(sigma > 0.0)) {
    throw ValidationError("sigma must be positive for sigma_mod");
  }
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
}

void generator_rhs(const CostSet& costs, const Eigen::MatrixXd& laplacian,
                   std::span<const double> r, std::span<const double> lambda,
                   GradientSource source, std::span<const double> y,
                   std::span<double> r_dot, std::span<double> lambda_dot) {
  const std::size_t n = costs.size();
  if (static_cast<std::size_t>(laplacian.rows()) != n || r.size() != n ||
      lambda.size() != n || r_dot.size() != n || lambda_dot.size() != n ||
      (source == GradientSource::kMeasured && y.size() != n)) {
    throw ValidationError("generator dimensions are inconsistent");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double s = source == GradientSource::kAnalytic ? r[i] : y[i];
    double coupling_lambda = 0.0;
    double coupling_r = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double l_ij = laplacian(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j));
      coupling_lambda += l_ij * lambda[j];
      coupling_r += l_ij * r[j];
    }
    r_dot[i] = -costs[i].grad(s) - coupling_lambda;
    lambda_dot[i] = coupling_r;
  }
}

Eigen::VectorXd error_transform(std::span<const double> x, double r,
                                double epsilon) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
  double scale = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = scale * (j == 0 ? x[0] - r : x[j]);
    scale *= epsilon;
  }
  return out;
}

Eigen::VectorXd inverse_error_transform(std::span<const double> x_hat,
                                        double r, double epsilon) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(x_hat.size()));
  double scale = 1.0;
  for (std::size_t j = 0; j < x_hat.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] =
        j == 0 ? x_hat[0] + r : x_hat[j] / scale;
    scale *= epsilon;
  }
  return out;
}

double control_input(const GainSet& gains, std::span<const double> x, double r,
                     std::span<const double> theta_hat,
                     std::span<const double> basis_value) {
  const std::size_t n = gains.order();
  double cancel = 0.0;
  for (std::size_t j = 0; j < theta_hat.size(); ++j) {
    cancel += theta_hat[j] * basis_value[j];
  }
  // k_1 (x_1 - r) + sum_{j>=2} eps^{j-1} k_j x_j, later scaled by eps^{-n}.
  double feedback = gains.k[0] * (x[0] - r);
  double eps_pow = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    eps_pow *= gains.epsilon;
    feedback += eps_pow * gains.k[static_cast<Eigen::Index>(j)] * x[j];
  }
  return -cancel + feedback / (eps_pow * gains.epsilon);
}

void adaptation_rhs(const AdaptiveLaw& law, const GainSet& gains,
                    std::span<const double> basis_value,
                    std::span<const double> x_hat,
                    std::span<const double> theta_hat,
                    std::span<double> theta_hat_dot) {
  const std::size_t m = basis_value.size();
  const Eigen::Index last = gains.P.rows() - 1;
  double error_signal = 0.0;  // b2^T P x_hat
  for (std::size_t j = 0; j < x_hat.size(); ++j) {
    error_signal += gains.P(last, static_cast<Eigen::Index>(j)) * x_hat[j];
  }
  for (std::size_t a = 0; a < m; ++a) {
    double v = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      v += law.gain(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
           basis_value[b];
    }
    theta_hat_dot[a] = v * error_signal;
    if (law.variant == AdaptiveVariant::kSigmaMod) {
      theta_hat_dot[a] -= law.sigma * theta_hat[a];
    }
  }
}

Eigen::VectorXd adaptation_rhs(const AdaptiveLaw& law, const GainSet& gains,
                               std::span<const double> basis_value,
                               std::span<const double> x_hat,
                               std::span<const double> theta_hat) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis_value.size()));
  adaptation_rhs(law, gains, basis_value, x_hat, theta_hat,
                 std::span(out.data(), basis_value.size()));
  return out;
}

}  // namespace distopt
