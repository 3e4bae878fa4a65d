#include <doctest.h>

#include <cmath>
#include <limits>

#include "distopt/costs.hpp"
#include "distopt/errors.hpp"
#include "oracles.hpp"

using namespace distopt;

namespace {

CostSet quadratics(std::initializer_list<double> centers) {
  CostSet out;
  for (double c : centers) out.push_back(builtin_cost("quadratic", {{c}}));
  return out;
}

std::vector<LocalCost> all_builtin_kinds() {
  return {builtin_cost("quadratic", {{-3.5}}), builtin_cost("consensus", {{2.0}}),
          builtin_cost("paper_f2"), builtin_cost("paper_f3"),
          builtin_cost("paper_f4")};
}

}  // namespace

TEST_SUITE("costs") {
  TEST_CASE("pointwise values and gradients") {
    const auto q = builtin_cost("quadratic", {{8.0}});
    CHECK(q(8.0) == 0.0);
    CHECK(q.grad(8.0) == 0.0);
    CHECK(q.grad(0.0) == -16.0);

    const auto f4 = builtin_cost(CostKind::kPaperF4);
    CHECK(f4(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(f4.grad(0.0) == 0.0);

    const auto f2 = builtin_cost(CostKind::kPaperF2);
    const double fd = oracle::central_difference(f2.eval, 1.0);
    CHECK(std::abs(f2.grad(1.0) - fd) <= 1e-6);
  }

  TEST_CASE("large arguments stay finite") {
    const auto f4 = builtin_cost(CostKind::kPaperF4);
    CHECK(std::isfinite(f4(1e5)));
    CHECK(f4(1e5) == doctest::Approx(0.05 * 1e5 + 1e10));
    CHECK(std::isfinite(f4.grad(-1e5)));
  }

  TEST_CASE("global gradient") {
    CHECK(std::abs(global_gradient(quadratics({1, 2, 3, 4}), 2.5)) <= 1e-14);
    CHECK(global_gradient(quadratics({8.0}), 0.0) == -16.0);
    CHECK(std::abs(global_gradient(paper_costs(), 3.24)) < 0.05);
  }

  TEST_CASE("global minimizer") {
    const double y = minimize_global(paper_costs());
    CHECK(std::abs(y - 3.24) <= 0.005);
    CHECK(std::round(y * 100.0) / 100.0 == doctest::Approx(3.24));
    CHECK(minimize_global(quadratics({1, 2, 3, 4})) ==
          doctest::Approx(2.5).epsilon(1e-10));
    CHECK(minimize_global(quadratics({8.0})) ==
          doctest::Approx(8.0).epsilon(1e-10));
  }

  TEST_CASE("bracket without a sign change is rejected") {
    CHECK_THROWS_AS(minimize_global(paper_costs(), {10.0, 20.0}),
                    ValidationError);
    CHECK_THROWS_AS(minimize_global(paper_costs(), {5.0, -5.0}),
                    ValidationError);
  }

  TEST_CASE("malformed cost parameters") {
    CHECK_THROWS_AS(builtin_cost("cubic"), ValidationError);
    CHECK_THROWS_AS(builtin_cost("quadratic"), ValidationError);
    CHECK_THROWS_AS(builtin_cost("paper_f2", {{1.0}}), ValidationError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(builtin_cost("quadratic", {{nan}}), ValidationError);
    CHECK(parse_cost_kind(to_string(CostKind::kPaperF3)) == CostKind::kPaperF3);
  }

  TEST_CASE("analytic gradients match finite differences on [-10, 10]") {
    for (const auto& f : all_builtin_kinds()) {
      for (int k = 0; k <= 20; ++k) {
        const double y = -10.0 + k;
        const double g = f.grad(y);
        const double fd = oracle::central_difference(f.eval, y);
        INFO(f.name << " at y = " << y);
        CHECK(std::abs(g - fd) <= 1e-5 * (1.0 + std::abs(g)));
      }
    }
  }

  TEST_CASE("global gradient is strictly increasing on [-100, 100]") {
    const auto costs = paper_costs();
    double prev = global_gradient(costs, -100.0);
    for (int k = 1; k <= 20000; ++k) {
      const double g = global_gradient(costs, -100.0 + 0.01 * k);
      REQUIRE(g > prev);
      prev = g;
    }
  }

  TEST_CASE("declared convexity and Lipschitz bounds hold on sampled secants") {
    for (const auto& f : all_builtin_kinds()) {
      if (!f.convexity_lower || !f.lipschitz_upper) continue;
      for (int k = 0; k < 400; ++k) {
        const double a = -50.0 + 0.25 * k;
        const double b = a + 0.1 + 0.01 * (k % 7);
        const double slope = (f.grad(b) - f.grad(a)) / (b - a);
        INFO(f.name << " on [" << a << ", " << b << "]");
        CHECK(slope >= *f.convexity_lower - 1e-9);
        CHECK(slope <= *f.lipschitz_upper + 1e-9);
      }
    }
  }

  TEST_CASE("every built-in cost is strongly convex on sampled points") {
    for (const auto& f : all_builtin_kinds()) {
      for (int k = 0; k < 200; ++k) {
        const double a = -20.0 + 0.2 * k;
        const double slope = (f.grad(a + 0.05) - f.grad(a)) / 0.05;
        CHECK(slope > 1.0);
      }
    }
  }

  TEST_CASE("minimizer is idempotent") {
    const auto costs = paper_costs();
    const double y1 = minimize_global(costs, {-100.0, 100.0}, 1e-12);
    const double y2 = minimize_global(costs, {y1 - 1e-3, y1 + 1e-3}, 1e-12);
    CHECK(std::abs(y1 - y2) <= 2e-12);
  }
}
