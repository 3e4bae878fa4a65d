#include "distopt/plant.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

double state_or_zero(std::span<const double> x, std::size_t j) {
  return j < x.size() ? x[j] : 0.0;
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, BasisComponent> components;

  Registry() {
    add({"neg_x1", [](std::span<const double> x, double) { return -x[0]; }});
    add({"vdp_damping", [](std::span<const double> x, double) {
           return (1.0 - x[0] * x[0]) * state_or_zero(x, 1);
         }});
    add({"sin_t", [](std::span<const double>, double t) { return std::sin(t); }});
    add({"cos_t", [](std::span<const double>, double t) { return std::cos(t); }});
    add({"one", [](std::span<const double>, double) { return 1.0; }});
  }

  void add(BasisComponent c) {
    const std::string key = c.name;
    components.insert_or_assign(key, std::move(c));
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_basis_component(BasisComponent component) {
  if (component.name.empty() || !component.fn) {
    throw ValidationError("basis component needs a name and a function");
  }
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.add(std::move(component));
}

bool has_basis_component(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.components.contains(name);
}

const BasisComponent& lookup_basis_component(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.components.find(name);
  if (it == r.components.end()) {
    throw ValidationError("unknown basis component '" + name + "'");
  }
  return it->second;
}

BasisVector BasisVector::from_names(const std::vector<std::string>& names) {
  std::vector<BasisComponent> comps;
  comps.reserve(names.size());
  for (const auto& n : names) comps.push_back(lookup_basis_component(n));
  return BasisVector(std::move(comps));
}

std::vector<std::string> BasisVector::names() const {
  std::vector<std::string> out;
  for (const auto& c : components_) out.push_back(c.name);
  return out;
}

Eigen::VectorXd BasisVector::evaluate(std::span<const double> x,
                                      double t) const {
  Eigen::VectorXd p(dim());
  evaluate(x, t, std::span(p.data(), dim()));
  return p;
}

void BasisVector::evaluate(std::span<const double> x, double t,
                           std::span<double> out) const {
  for (std::size_t j = 0; j < components_.size(); ++j) {
    out[j] = components_[j].fn(x, t);
  }
}

void AgentModel::validate() const {
  if (order == 0) throw ValidationError("agent order must be at least 1");
  if (static_cast<std::size_t>(true_theta.size()) != basis.dim()) {
    throw ValidationError("theta has " + std::to_string(true_theta.size()) +
                          " entries but the basis has " +
                          std::to_string(basis.dim()));
  }
}

double AgentModel::uncertainty(std::span<const double> x, double t) const {
  double delta = 0.0;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    delta += true_theta[static_cast<Eigen::Index>(j)] * basis[j].fn(x, t);
  }
  return delta;
}

Eigen::VectorXd agent_rhs(const AgentModel& model, std::span<const double> x,
                          double u, double t) {
  if (x.size() != model.order) {
    throw ValidationError("state has " + std::to_string(x.size()) +
                          " components, agent order is " +
                          std::to_string(model.order));
  }
  const auto n = static_cast<Eigen::Index>(model.order);
  Eigen::VectorXd dx(n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) dx[j] = x[j + 1];
  dx[n - 1] = model.uncertainty(x, t) + u;
  return dx;
}

double Exosystem::disturbance(double t) const {
  const Eigen::Matrix2d transition = (generator * t).exp();
  return output * transition * v0;
}

SinusoidAmplitudes harmonic_amplitudes(const Exosystem& exo) {
  const Eigen::Matrix2d rotation{{0.0, 1.0}, {-1.0, 0.0}};
  if (exo.generator != rotation) {
    throw ValidationError(
        "harmonic amplitudes need the unit-frequency generator [0 1; -1 0]");
  }
  // exp(S t) = [cos t, sin t; -sin t, cos t], so
  // D exp(S t) v0 = (d1 v01 + d2 v02) cos t + (d1 v02 - d2 v01) sin t.
  const double d1 = exo.output[0], d2 = exo.output[1];
  const double v1 = exo.v0[0], v2 = exo.v0[1];
  return {d1 * v2 - d2 * v1, d1 * v1 + d2 * v2};
}

AgentModel vdp_preset(double a, double b, const Exosystem& exo) {
  if (!(a > 0.0)) throw ValidationError("Van der Pol stiffness a must be positive");
  if (!(b > 0.0)) throw ValidationError("Van der Pol damping b must be positive");
  const auto amp = harmonic_amplitudes(exo);
  AgentModel m;
  m.order = 2;
  m.basis = BasisVector::from_names({"neg_x1", "vdp_damping", "sin_t", "cos_t"});
  m.true_theta = Eigen::Vector4d(a, b, amp.sin_coeff, amp.cos_coeff);
  return m;
}

}  // namespace distopt
