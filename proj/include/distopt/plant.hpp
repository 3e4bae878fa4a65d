#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace distopt {

// One entry p_j(x, t) of a regressor vector.
struct BasisComponent {
  std::string name;
  std::function<double(std::span<const double> x, double t)> fn;
};

// Known regressor p(x, t) of a linearly parameterized uncertainty.
class BasisVector {
 public:
  BasisVector() = default;
  explicit BasisVector(std::vector<BasisComponent> components)
      : components_(std::move(components)) {}

  // Builds from registered component names; throws ValidationError for
  // unknown names.
  static BasisVector from_names(const std::vector<std::string>& names);

  std::size_t dim() const { return components_.size(); }
  const BasisComponent& operator[](std::size_t j) const {
    return components_[j];
  }
  std::vector<std::string> names() const;

  Eigen::VectorXd evaluate(std::span<const double> x, double t) const;
  void evaluate(std::span<const double> x, double t,
                std::span<double> out) const;

 private:
  std::vector<BasisComponent> components_;
};

// Registry of named basis components used by scenario files. Built-ins:
// "neg_x1" (-x1), "vdp_damping" ((1 - x1^2) x2), "sin_t", "cos_t", "one".
void register_basis_component(BasisComponent component);
const BasisComponent& lookup_basis_component(const std::string& name);
bool has_basis_component(const std::string& name);

// Chain of integrators of order n driven by u + theta^T p(x, t); y = x_1.
struct AgentModel {
  std::size_t order = 1;
  BasisVector basis;
  Eigen::VectorXd true_theta;

  std::size_t n_theta() const { return basis.dim(); }
  // Throws ValidationError on order 0 or theta/basis size mismatch.
  void validate() const;
  double uncertainty(std::span<const double> x, double t) const;
};

// x_j' = x_{j+1} (j < n), x_n' = theta^T p(x, t) + u.
Eigen::VectorXd agent_rhs(const AgentModel& model, std::span<const double> x,
                          double u, double t);

// Linear exosystem v' = S v driving d = D v.
struct Exosystem {
  Eigen::RowVector2d output{1.0, 0.0};
  Eigen::Matrix2d generator{{0.0, 1.0}, {-1.0, 0.0}};
  Eigen::Vector2d v0{1.0, 0.0};

  // d(t) = D exp(S t) v0.
  double disturbance(double t) const;
};

struct SinusoidAmplitudes {
  double sin_coeff;  // A1
  double cos_coeff;  // A2
};

// For D = [1 0], S = [0 1; -1 0]: d(t) = v0_2 sin t + v0_1 cos t.
SinusoidAmplitudes harmonic_amplitudes(const Exosystem& exo);

// Van der Pol agent with harmonic actuator disturbance folded into the basis:
// p = (-x1, (1 - x1^2) x2, sin t, cos t), theta = (a, b, A1, A2).
AgentModel vdp_preset(double a, double b, const Exosystem& exo = {});

}  // namespace distopt
