#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "distopt/errors.hpp"
#include "distopt/numerics.hpp"
#include "distopt/plant.hpp"
#include "oracles.hpp"

using namespace distopt;

TEST_SUITE("plant") {
  TEST_CASE("Van der Pol preset from the default exosystem") {
    const auto m = vdp_preset(1.0, 1.0);
    CHECK(m.order == 2);
    CHECK(m.true_theta == Eigen::Vector4d(1, 1, 0, 1));
    CHECK(m.basis.names() ==
          std::vector<std::string>{"neg_x1", "vdp_damping", "sin_t", "cos_t"});
  }

  TEST_CASE("double integrator without uncertainty") {
    AgentModel m{2, BasisVector::from_names({"one"}), Eigen::VectorXd::Zero(1)};
    const double x[] = {0.0, 1.0};
    CHECK(agent_rhs(m, x, 0.0, 0.3) == Eigen::Vector2d(1.0, 0.0));
  }

  TEST_CASE("undisturbed Van der Pol agent") {
    Exosystem exo;
    exo.v0.setZero();
    const auto m = vdp_preset(1.0, 1.0, exo);
    const double x[] = {1.0, 0.0};
    for (double t : {0.0, 0.9, 4.0}) {
      const auto dx = agent_rhs(m, x, 0.0, t);
      CHECK(dx[0] == 0.0);
      CHECK(dx[1] == -1.0);
    }
  }

  TEST_CASE("chain right-hand side with an input") {
    const auto m = vdp_preset(1.0, 1.0);
    const double x[] = {1.0, 0.0};
    const auto dx = agent_rhs(m, x, 0.0, std::numbers::pi / 2);
    // theta^T p = -1 + 0 + 0 + cos(pi/2)
    CHECK(dx[0] == 0.0);
    CHECK(dx[1] == doctest::Approx(-1.0));
  }

  TEST_CASE("input cancelling the uncertainty leaves a pure chain") {
    const auto m = vdp_preset(1.0, 1.0);
    const double x[] = {2.0, 3.0};
    const double t = 0.7;
    const auto dx = agent_rhs(m, x, -m.uncertainty(x, t) + 0.0, t);
    CHECK(dx[0] == 3.0);
    CHECK(std::abs(dx[1]) <= 1e-14);
  }

  TEST_CASE("basis at the optimum operating point") {
    const auto basis =
        BasisVector::from_names({"neg_x1", "vdp_damping", "sin_t", "cos_t"});
    const double x[] = {3.24, 0.0};
    const auto p = basis.evaluate(x, 0.0);
    CHECK(p[0] == -3.24);
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 0.0);
    CHECK(p[3] == 1.0);
  }

  TEST_CASE("exosystem output matches an independent integration") {
    const Exosystem exo;
    for (double t : {0.0, std::numbers::pi / 4, std::numbers::pi / 2}) {
      const Eigen::VectorXd v =
          oracle::rk4_linear(exo.generator, exo.v0, t, 1e-4);
      CHECK(std::abs(exo.output.dot(v) - std::cos(t)) <= 1e-9);
      CHECK(std::abs(exo.disturbance(t) - std::cos(t)) <= 1e-12);
    }
  }

  TEST_CASE("harmonic amplitudes reproduce the disturbance") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      Exosystem exo;
      exo.output = {u(rng), u(rng)};
      exo.v0 = {u(rng), u(rng)};
      const auto amp = harmonic_amplitudes(exo);
      for (double t : {0.0, 0.4, 1.3, 5.0}) {
        const Eigen::VectorXd v =
            oracle::rk4_linear(exo.generator, exo.v0, t, 1e-4);
        const double d = exo.output.dot(v);
        CHECK(std::abs(amp.sin_coeff * std::sin(t) +
                       amp.cos_coeff * std::cos(t) - d) <= 1e-9);
      }
    }
  }

  TEST_CASE("zero exosystem state gives zero amplitudes") {
    Exosystem exo;
    exo.v0.setZero();
    const auto m = vdp_preset(1.0, 1.0, exo);
    CHECK(m.true_theta[2] == 0.0);
    CHECK(m.true_theta[3] == 0.0);
  }

  TEST_CASE("exosystem state norm is conserved") {
    const Exosystem exo;
    OdeSystem sys{2, [&](double, const Eigen::VectorXd& v,
                         Eigen::VectorXd& dv) { dv = exo.generator * v; }};
    double worst = 0.0;
    integrate(sys, exo.v0, {1e-3, 20.0},
              [&](std::size_t, double, const Eigen::VectorXd& v) {
                worst = std::max(worst, std::abs(v.norm() - 1.0));
              });
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("invalid models") {
    CHECK_THROWS_AS(vdp_preset(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(vdp_preset(1.0, -1.0), ValidationError);
    CHECK_THROWS_AS(BasisVector::from_names({"tan_t"}), ValidationError);
    AgentModel m = vdp_preset(1.0, 1.0);
    m.true_theta = Eigen::Vector3d::Zero();
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = vdp_preset(1.0, 1.0);
    const double x3[] = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(agent_rhs(m, x3, 0.0, 0.0), ValidationError);
    m.order = 0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
  }

  TEST_CASE("custom basis components can be registered") {
    register_basis_component(
        {"test_x2_sq", [](std::span<const double> x, double) {
           return x[1] * x[1];
         }});
    CHECK(has_basis_component("test_x2_sq"));
    const auto b = BasisVector::from_names({"test_x2_sq", "one"});
    const double x[] = {0.0, 3.0};
    CHECK(b.evaluate(x, 0.0) == Eigen::Vector2d(9.0, 1.0));
  }

  TEST_CASE("chain structure and linear parameterization") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto basis =
        BasisVector::from_names({"neg_x1", "vdp_damping", "sin_t", "cos_t"});
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng() % 4;
      AgentModel m{n, basis, Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng))};
      std::vector<double> x(n);
      for (auto& xi : x) xi = u(rng);
      const double t = u(rng) + 3.0, input = u(rng);
      const auto dx = agent_rhs(m, x, input, t);
      for (std::size_t j = 0; j + 1 < n; ++j) CHECK(dx[j] == x[j + 1]);

      // Direct evaluation of theta^T p with the closed-form regressor.
      const double p[] = {-x[0], (1 - x[0] * x[0]) * x[1], std::sin(t),
                          std::cos(t)};
      double expected = input;
      for (int j = 0; j < 4; ++j) expected += m.true_theta[j] * p[j];
      CHECK(std::abs(dx[n - 1] - expected) <= 1e-12 * (1 + std::abs(expected)));
    }
  }
}
