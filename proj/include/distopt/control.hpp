#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distopt/costs.hpp"
#include "distopt/graph.hpp"

namespace distopt {

// Feedback gains k_1..k_n such that s^n - k_n s^{n-1} - ... - k_2 s - k_1 has
// exactly the given roots. Roots must be closed under conjugation and lie in
// the open left half-plane.
Eigen::VectorXd design_gains(std::size_t order,
                             const std::vector<std::complex<double>>& roots);

// [[0 | I], [k_1 ... k_n]].
Eigen::MatrixXd companion(const Eigen::VectorXd& k);

// Unique P = P^T > 0 with A^T P + P A = -2 I, via the Kronecker-vectorized
// linear system. Throws ValidationError when A is not Hurwitz.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a);

// Tracking-loop gains of one agent.
struct GainSet {
  Eigen::VectorXd k;
  double epsilon = 0.2;
  Eigen::MatrixXd A;
  Eigen::MatrixXd P;

  std::size_t order() const { return static_cast<std::size_t>(k.size()); }
  // Row b2^T P (last row of P).
  Eigen::RowVectorXd b2_P() const { return P.row(P.rows() - 1); }

  // Pole placement plus Lyapunov solve. Throws ValidationError when epsilon
  // is not positive or the poles are not admissible.
  static GainSet design(std::size_t order,
                        const std::vector<std::complex<double>>& poles,
                        double epsilon);
  // All poles at -2, the default closed-loop placement.
  static GainSet with_default_poles(std::size_t order, double epsilon);

  // Checks the Hurwitz property and the Lyapunov residual (<= 1e-9).
  void validate() const;
};

enum class AdaptiveVariant {
  kOnline,    // measured gradient at y_i, small epsilon
  kOffline,   // analytic gradient at r_i, any epsilon
  kSigmaMod,  // measured gradient with leakage -sigma * theta_hat
};

AdaptiveVariant parse_variant(const std::string& name);
const char* to_string(AdaptiveVariant variant);

enum class GradientSource { kAnalytic, kMeasured };

struct AdaptiveLaw {
  AdaptiveVariant variant = AdaptiveVariant::kOnline;
  Eigen::MatrixXd gain;  // Lambda, symmetric positive definite
  double sigma = 0.0;

  static AdaptiveLaw make(AdaptiveVariant variant, std::size_t n_theta,
                          double lambda_gain = 1.0, double sigma = 0.05);

  GradientSource gradient_source() const {
    return variant == AdaptiveVariant::kOffline ? GradientSource::kAnalytic
                                                : GradientSource::kMeasured;
  }
  void validate() const;
};

struct ControllerState {
  double r = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd theta_hat;
};

// Optimal signal generator with either analytic (r_i) or measured (y_i)
// gradient evaluation:
//   r_i'      = -grad f_i(s_i) - sum_j a_ij (lambda_i - lambda_j)
//   lambda_i' =  sum_j a_ij (r_i - r_j)
// `y` is only read for the measured source.
void generator_rhs(const CostSet& costs, const Eigen::MatrixXd& laplacian,
                   std::span<const double> r, std::span<const double> lambda,
                   GradientSource source, std::span<const double> y,
                   std::span<double> r_dot, std::span<double> lambda_dot);

// x_hat = (x_1 - r, eps x_2, ..., eps^{n-1} x_n).
Eigen::VectorXd error_transform(std::span<const double> x, double r,
                                double epsilon);
Eigen::VectorXd inverse_error_transform(std::span<const double> x_hat,
                                        double r, double epsilon);

// Certainty-equivalence input
//   u = -theta_hat^T p + eps^{-n} [k_1 (x_1 - r) + sum_{j>=2} eps^{j-1} k_j x_j].
double control_input(const GainSet& gains, std::span<const double> x, double r,
                     std::span<const double> theta_hat,
                     std::span<const double> basis_value);

// theta_hat' = Lambda p (b2^T P x_hat) [- sigma theta_hat for sigma_mod].
void adaptation_rhs(const AdaptiveLaw& law, const GainSet& gains,
                    std::span<const double> basis_value,
                    std::span<const double> x_hat,
                    std::span<const double> theta_hat,
                    std::span<double> theta_hat_dot);
Eigen::VectorXd adaptation_rhs(const AdaptiveLaw& law, const GainSet& gains,
                               std::span<const double> basis_value,
                               std::span<const double> x_hat,
                               std::span<const double> theta_hat);

}  // namespace distopt
