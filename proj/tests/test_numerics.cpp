#include <doctest.h>

#include <cmath>
#include <numbers>

#include "distopt/errors.hpp"
#include "distopt/numerics.hpp"

using namespace distopt;

namespace {

OdeSystem decay() {
  return {1, [](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
            dx = -x;
          }};
}

OdeSystem rotation() {
  return {2, [](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
            dx[0] = x[1];
            dx[1] = -x[0];
          }};
}

double decay_error(double h) {
  const auto x = integrate(decay(), Eigen::VectorXd::Ones(1), {h, 1.0});
  return std::abs(x[0] - std::exp(-1.0));
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("exponential decay") {
    const auto x = integrate(decay(), Eigen::VectorXd::Ones(1), {0.01, 1.0});
    CHECK(std::abs(x[0] - std::exp(-1.0)) <= 1e-9);
  }

  TEST_CASE("harmonic oscillator returns after one period") {
    Eigen::Vector2d x0(1.0, 0.0);
    const auto x =
        integrate(rotation(), x0, {1e-3, 2.0 * std::numbers::pi});
    CHECK((x - x0).norm() <= 1e-7);
  }

  TEST_CASE("zero vector field leaves the state unchanged") {
    OdeSystem zero{3, [](double, const Eigen::VectorXd&, Eigen::VectorXd& dx) {
                     dx.setZero();
                   }};
    Eigen::Vector3d x0(1.5, -2.0, 0.25);
    CHECK(integrate(zero, x0, {1e-3, 7.0}) == x0);
  }

  TEST_CASE("fourth-order convergence") {
    const double ratio = decay_error(0.1) / decay_error(0.05);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }

  TEST_CASE("runs are bitwise deterministic") {
    std::vector<double> a, b;
    auto record = [](std::vector<double>& out) {
      return [&out](std::size_t, double t, const Eigen::VectorXd& x) {
        out.push_back(t);
        out.push_back(x[0]);
        out.push_back(x[1]);
      };
    };
    Eigen::Vector2d x0(0.3, -0.7);
    integrate(rotation(), x0, {1e-3, 3.0}, record(a));
    integrate(rotation(), x0, {1e-3, 3.0}, record(b));
    CHECK(a == b);
  }

  TEST_CASE("observer sees t = 0 and a shortened final step ending at t_end") {
    std::vector<double> times;
    integrate(decay(), Eigen::VectorXd::Ones(1), {0.3, 1.0},
              [&](std::size_t, double t, const Eigen::VectorXd&) {
                times.push_back(t);
              });
    REQUIRE(times.size() == 5);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == 1.0);
    CHECK(times[3] == doctest::Approx(0.9));
  }

  TEST_CASE("finite escape is reported with its time") {
    OdeSystem blowup{1, [](double, const Eigen::VectorXd& x,
                           Eigen::VectorXd& dx) { dx = x.cwiseProduct(x); }};
    try {
      integrate(blowup, Eigen::VectorXd::Ones(1), {1e-3, 2.0, 1e6});
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.blowup_time() > 0.99);
      CHECK(e.blowup_time() < 1.01);
      CHECK(e.components() == std::vector<std::size_t>{0});
    }
  }

  TEST_CASE("invalid configurations") {
    CHECK_THROWS_AS(integrate(decay(), Eigen::VectorXd::Ones(1), {0.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(integrate(decay(), Eigen::VectorXd::Ones(1), {1e-3, -1.0}),
                    ValidationError);
    CHECK_THROWS_AS(integrate(decay(), Eigen::VectorXd::Ones(2), {1e-3, 1.0}),
                    ValidationError);
  }

  TEST_CASE("Hurwitz test") {
    CHECK(is_hurwitz(Eigen::MatrixXd{{0, 1}, {-4, -4}}));
    CHECK_FALSE(is_hurwitz(Eigen::MatrixXd{{0, 1}, {0, 0}}));
    CHECK_FALSE(is_hurwitz(Eigen::MatrixXd{{0, 1}, {-1, 0}}));
    CHECK(is_hurwitz(Eigen::MatrixXd{{-1}}));
    CHECK_FALSE(is_hurwitz(Eigen::MatrixXd{{1}}));
    CHECK(is_hurwitz(Eigen::MatrixXd{{-1e-3}}));
  }

  TEST_CASE("smallest symmetric eigenvalue") {
    const double half_pi = std::numbers::pi / 2;
    CHECK(min_eig_symmetric(half_pi * Eigen::MatrixXd::Identity(2, 2)) ==
          doctest::Approx(half_pi).epsilon(1e-15));
    CHECK(min_eig_symmetric(Eigen::MatrixXd{{1, 0}, {0, 3}}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(min_eig_symmetric(Eigen::MatrixXd{{1, 1}, {1, 1}})) <= 1e-15);
    CHECK(min_eig_symmetric(Eigen::MatrixXd{{2, 1}, {1, 2}}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(min_eig_symmetric(Eigen::MatrixXd{{1, 0}, {0, -3}}) ==
          doctest::Approx(-3.0).epsilon(1e-14));
    CHECK_THROWS_AS(min_eig_symmetric(Eigen::MatrixXd{{1, 1}, {0, 1}}),
                    ValidationError);
  }
}
