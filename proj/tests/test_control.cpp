#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "distopt/control.hpp"
#include "distopt/errors.hpp"
#include "distopt/numerics.hpp"
#include "distopt/plant.hpp"
#include "distopt/presets.hpp"
#include "oracles.hpp"

using namespace distopt;
using cd = std::complex<double>;

namespace {

template <typename V>
std::span<const double> in(const V& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

template <typename V>
std::span<double> out(V& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p) {
  const auto n = a.rows();
  const Eigen::MatrixXd r =
      a.transpose() * p + p * a + 2.0 * Eigen::MatrixXd::Identity(n, n);
  return r.cwiseAbs().rowwise().sum().maxCoeff();
}

// Random conjugate-closed root set in the open left half-plane with a minimum
// pairwise separation.
std::vector<cd> random_roots(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> re(-4.0, -0.2), im(0.2, 3.0),
      coin(0.0, 1.0);
  for (;;) {
    std::vector<cd> roots;
    while (roots.size() < n) {
      if (n - roots.size() >= 2 && coin(rng) < 0.5) {
        const double a = re(rng), b = im(rng);
        roots.emplace_back(a, b);
        roots.emplace_back(a, -b);
      } else {
        roots.emplace_back(re(rng), 0.0);
      }
    }
    double sep = 1e9;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        sep = std::min(sep, std::abs(roots[i] - roots[j]));
    if (sep > 0.15) return roots;
  }
}

}  // namespace

TEST_SUITE("control") {
  TEST_CASE("pole placement examples") {
    CHECK(design_gains(2, {-2.0, -2.0}) == Eigen::Vector2d(-4, -4));
    CHECK(design_gains(1, {-1.0}) == Eigen::VectorXd::Constant(1, -1.0));
    const auto k = design_gains(3, {-1.0, cd(-1, 1), cd(-1, -1)});
    const auto expected_poly =
        oracle::poly_from_roots({-1.0, cd(-1, 1), cd(-1, -1)});
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(k[j] + expected_poly[j].real()) <= 1e-12);
    }
    CHECK((k - Eigen::Vector3d(-2, -4, -3)).norm() <= 1e-12);
  }

  TEST_CASE("inadmissible poles") {
    CHECK_THROWS_AS(design_gains(2, {cd(-1, 1), cd(-2, -1)}), ValidationError);
    CHECK_THROWS_AS(design_gains(2, {-1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(design_gains(1, {0.5}), ValidationError);
    CHECK_THROWS_AS(design_gains(3, {-1.0, -2.0}), ValidationError);
  }

  TEST_CASE("companion matrices") {
    CHECK(companion(Eigen::Vector2d(-4, -4)) ==
          Eigen::MatrixXd{{0, 1}, {-4, -4}});
    CHECK(companion(Eigen::VectorXd::Constant(1, -1.0)) ==
          Eigen::MatrixXd{{-1}});
    const auto a = companion(Eigen::Vector3d(-2, -4, -3));
    const auto ev = eigenvalues(a);
    for (cd root : {cd(-1, 0), cd(-1, 1), cd(-1, -1)}) {
      double best = 1e9;
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        best = std::min(best, std::abs(ev[i] - root));
      CHECK(best <= 1e-9);
      // det(A - root I) vanishes at every eigenvalue.
      const Eigen::MatrixXcd shifted =
          a.cast<cd>() - root * Eigen::MatrixXcd::Identity(3, 3);
      CHECK(std::abs(shifted.determinant()) <= 1e-12);
    }
  }

  TEST_CASE("Lyapunov solutions") {
    const Eigen::MatrixXd a{{0, 1}, {-4, -4}};
    const Eigen::MatrixXd expected{{9.0 / 4, 1.0 / 4}, {1.0 / 4, 5.0 / 16}};
    CHECK(lyapunov_residual(a, expected) <= 1e-12);
    const auto p = solve_lyapunov(a);
    CHECK((p - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(lyapunov_residual(a, p) <= 1e-12);

    CHECK((solve_lyapunov(Eigen::MatrixXd{{-1}}) - Eigen::MatrixXd{{1}})
              .norm() <= 1e-14);
    const Eigen::MatrixXd d = Eigen::Vector2d(-1, -2).asDiagonal();
    const Eigen::MatrixXd pd = Eigen::Vector2d(1, 0.5).asDiagonal();
    CHECK((solve_lyapunov(d) - pd).norm() <= 1e-14);

    CHECK_THROWS_AS(solve_lyapunov(Eigen::MatrixXd{{0, 1}, {0, 0}}),
                    ValidationError);
  }

  TEST_CASE("random designs: companion eigenvalues, Lyapunov residual, P > 0") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng() % 6;
      const auto roots = random_roots(rng, n);
      const auto k = design_gains(n, roots);
      for (const auto& root : roots) {
        CHECK(std::abs(oracle::gain_polynomial(k, root)) <=
              1e-9 * std::pow(1.0 + std::abs(root), n));
      }
      const auto a = companion(k);
      CHECK(is_hurwitz(a));
      const auto p = solve_lyapunov(a);
      CHECK(lyapunov_residual(a, p) <= 1e-9);
      CHECK((p - p.transpose()).norm() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }

  TEST_CASE("gain sets") {
    const auto g = GainSet::with_default_poles(2, 0.2);
    CHECK(g.k == Eigen::Vector2d(-4, -4));
    CHECK(g.b2_P().isApprox(Eigen::RowVector2d(0.25, 5.0 / 16), 1e-12));
    CHECK_NOTHROW(g.validate());
    CHECK_THROWS_WITH_AS(GainSet::design(2, {-2.0, -2.0}, 0.0),
                         doctest::Contains("epsilon must be positive"),
                         ValidationError);
    CHECK_THROWS_AS(GainSet::design(2, {-2.0, -2.0}, -1.0), ValidationError);
  }

  TEST_CASE("adaptive laws") {
    CHECK(parse_variant("sigma_mod") == AdaptiveVariant::kSigmaMod);
    CHECK(parse_variant(to_string(AdaptiveVariant::kOffline)) ==
          AdaptiveVariant::kOffline);
    CHECK_THROWS_AS(parse_variant("robust"), ValidationError);
    CHECK(AdaptiveLaw::make(AdaptiveVariant::kOffline, 4).gradient_source() ==
          GradientSource::kAnalytic);
    CHECK(AdaptiveLaw::make(AdaptiveVariant::kOnline, 4).gradient_source() ==
          GradientSource::kMeasured);
    CHECK_THROWS_AS(AdaptiveLaw::make(AdaptiveVariant::kOnline, 4, 0.0),
                    ValidationError);
    CHECK_THROWS_AS(AdaptiveLaw::make(AdaptiveVariant::kSigmaMod, 4, 1.0, 0.0),
                    ValidationError);
    auto law = AdaptiveLaw::make(AdaptiveVariant::kOnline, 2);
    law.gain = Eigen::MatrixXd{{1, 2}, {2, 1}};
    CHECK_THROWS_AS(law.validate(), ValidationError);
  }

  TEST_CASE("generator at the optimum equilibrium") {
    const auto costs = paper_costs();
    const auto l = laplacian(paper_topology());
    const double y_star = minimize_global(costs, {-100, 100}, 1e-13);
    Eigen::Vector4d grad;
    for (int i = 0; i < 4; ++i) grad[i] = costs[i].grad(y_star);
    const Eigen::VectorXd lam = oracle::least_squares(l, -grad);
    const Eigen::Vector4d r = Eigen::Vector4d::Constant(y_star);
    Eigen::Vector4d rd, ld;
    generator_rhs(costs, l, in(r), in(lam), GradientSource::kAnalytic, in(r),
                  out(rd), out(ld));
    CHECK(rd.cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(ld.cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("generator with quadratics at their centers") {
    CostSet costs;
    for (double c : {1.0, 2.0, 3.0, 4.0})
      costs.push_back(builtin_cost("quadratic", {{c}}));
    const auto l = laplacian(paper_topology());
    const Eigen::Vector4d c(1, 2, 3, 4);
    const Eigen::Vector4d zero = Eigen::Vector4d::Zero();
    Eigen::Vector4d rd, ld;
    generator_rhs(costs, l, in(c), in(zero), GradientSource::kAnalytic, in(c),
                  out(rd), out(ld));
    CHECK(rd == zero);
    CHECK(ld == l * c);
  }

  TEST_CASE("measured source evaluates gradients at the outputs") {
    CostSet costs{builtin_cost("quadratic", {{0.0}}),
                  builtin_cost("quadratic", {{0.0}})};
    const auto l = laplacian(Topology::from_edges(2, {{1, 2, 1.0}}));
    const Eigen::Vector2d r(1.0, 1.0), lam(0.0, 0.0), y(3.0, -1.0);
    Eigen::Vector2d rd, ld;
    generator_rhs(costs, l, in(r), in(lam), GradientSource::kMeasured, in(y),
                  out(rd), out(ld));
    CHECK(rd == Eigen::Vector2d(-6.0, 2.0));
    generator_rhs(costs, l, in(r), in(lam), GradientSource::kAnalytic, in(y),
                  out(rd), out(ld));
    CHECK(rd == Eigen::Vector2d(-2.0, -2.0));
  }

  TEST_CASE("multiplier sum is conserved for any state") {
    const auto costs = paper_costs();
    const auto l = laplacian(paper_topology());
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::Vector4d r, lam, y, rd, ld;
      for (int i = 0; i < 4; ++i) {
        r[i] = u(rng);
        lam[i] = u(rng);
        y[i] = u(rng);
      }
      generator_rhs(costs, l, in(r), in(lam), GradientSource::kMeasured, in(y),
                  out(rd), out(ld));
      CHECK(std::abs(ld.sum()) <= 1e-12 * (1 + ld.cwiseAbs().sum()));
    }
  }

  TEST_CASE("error transform") {
    const double on_target[] = {2.0, 0.0, 0.0};
    CHECK(error_transform(std::span<const double>(on_target), 2.0, 0.3) == Eigen::Vector3d::Zero());
    const double x[] = {1.0, 5.0};
    CHECK(error_transform(std::span<const double>(x), 0.0, 0.2).isApprox(Eigen::Vector2d(1, 1), 1e-15));

    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> xs(1 + rng() % 5);
      for (auto& v : xs) v = u(rng);
      const double r = u(rng), eps = 0.05 + std::abs(u(rng)) / 5;
      const auto xh = error_transform(xs, r, eps);
      const auto back = inverse_error_transform(
          std::span<const double>(xh.data(), xh.size()), r, eps);
      for (std::size_t j = 0; j < xs.size(); ++j)
        CHECK(std::abs(back[j] - xs[j]) <= 1e-12 * (1 + std::abs(xs[j])));
    }
  }

  TEST_CASE("control input") {
    const auto g = GainSet::with_default_poles(2, 0.2);
    const double zero4[] = {0, 0, 0, 0};
    const double x[] = {1.0, 0.0};
    CHECK(control_input(g, x, 0.0, zero4, zero4) == doctest::Approx(-100.0));

    // Static feedback when epsilon is one.
    const auto g1 = GainSet::design(2, {-1.0, -3.0}, 1.0);
    const double x2[] = {2.0, -1.5};
    const double expected = g1.k[0] * (2.0 - 0.5) + g1.k[1] * -1.5;
    CHECK(control_input(g1, x2, 0.5, zero4, zero4) ==
          doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("certainty equivalence cancels a known uncertainty on target") {
    const auto m = vdp_preset(1.0, 1.0);
    const auto g = GainSet::with_default_poles(2, 0.2);
    const double r = 1.7, t = 0.8;
    const double x[] = {r, 0.0};
    const auto p = m.basis.evaluate(x, t);
    const double u = control_input(g, x, r, in(m.true_theta), in(p));
    CHECK(u == doctest::Approx(-m.true_theta.dot(p)).epsilon(1e-14));
    const auto dx = agent_rhs(m, x, u, t);
    CHECK(dx.cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("adaptation law") {
    const auto g = GainSet::with_default_poles(2, 0.2);
    const auto online = AdaptiveLaw::make(AdaptiveVariant::kOnline, 4, 10.0);
    const Eigen::Vector4d p(0.3, -1, 2, 5), th0(1, -2, 0.5, 3);
    const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
    CHECK(adaptation_rhs(online, g, in(p), in(zero), in(th0)) == Eigen::Vector4d::Zero());

    const auto leak =
        AdaptiveLaw::make(AdaptiveVariant::kSigmaMod, 4, 10.0, 0.05);
    CHECK(adaptation_rhs(leak, g, in(p), in(zero), in(th0)).isApprox(-0.05 * th0, 1e-15));

    // b2^T P x_hat = 0.5 with P's last row (1/4, 5/16).
    const Eigen::Vector2d xh(2.0, 0.0);
    REQUIRE(g.b2_P().dot(xh) == doctest::Approx(0.5));
    const Eigen::Vector4d e1(1, 0, 0, 0);
    CHECK(adaptation_rhs(online, g, in(e1), in(xh), in(th0))
              .isApprox(Eigen::Vector4d(5, 0, 0, 0), 1e-14));
  }
}
