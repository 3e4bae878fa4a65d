#include "distopt/costs.hpp"

#include <cmath>
#include <string>

#include "distopt/errors.hpp"

namespace distopt {
namespace {

void expect_params(CostKind kind, std::span<const double> params,
                   std::size_t count) {
  if (params.size() != count) {
    throw ValidationError(std::string("cost '") + to_string(kind) +
                          "' expects " + std::to_string(count) +
                          " parameter(s), got " +
                          std::to_string(params.size()));
  }
  for (double p : params) {
    if (!std::isfinite(p)) {
      throw ValidationError(std::string("cost '") + to_string(kind) +
                            "' has a non-finite parameter");
    }
  }
}

LocalCost shifted_square(std::string name, double center) {
  return LocalCost{
      std::move(name),
      [center](double y) { return (y - center) * (y - center); },
      [center](double y) { return 2.0 * (y - center); },
      2.0,
      2.0,
  };
}

}  // namespace

CostKind parse_cost_kind(const std::string& name) {
  if (name == "quadratic") return CostKind::kQuadratic;
  if (name == "consensus") return CostKind::kConsensus;
  if (name == "paper_f2") return CostKind::kPaperF2;
  if (name == "paper_f3") return CostKind::kPaperF3;
  if (name == "paper_f4") return CostKind::kPaperF4;
  throw ValidationError("unknown cost kind '" + name + "'");
}

const char* to_string(CostKind kind) {
  switch (kind) {
    case CostKind::kQuadratic: return "quadratic";
    case CostKind::kConsensus: return "consensus";
    case CostKind::kPaperF2: return "paper_f2";
    case CostKind::kPaperF3: return "paper_f3";
    case CostKind::kPaperF4: return "paper_f4";
  }
  return "unknown";
}

LocalCost builtin_cost(CostKind kind, std::span<const double> params) {
  switch (kind) {
    case CostKind::kQuadratic:
      expect_params(kind, params, 1);
      return shifted_square("quadratic", params[0]);
    case CostKind::kConsensus:
      expect_params(kind, params, 1);
      return shifted_square("consensus", params[0]);
    case CostKind::kPaperF2:
      expect_params(kind, params, 0);
      // y^2 / (20 s) + y^2 with s = sqrt(y^2 + 1);
      // d/dy [y^2 / s] = (2y s^2 - y^3) / s^3 = y (y^2 + 2) / s^3.
      return LocalCost{
          "paper_f2",
          [](double y) {
            return y * y / (20.0 * std::sqrt(y * y + 1.0)) + y * y;
          },
          [](double y) {
            const double s2 = y * y + 1.0;
            const double s3 = s2 * std::sqrt(s2);
            return y * (y * y + 2.0) / (20.0 * s3) + 2.0 * y;
          },
          std::nullopt,
          std::nullopt,
      };
    case CostKind::kPaperF3:
      expect_params(kind, params, 0);
      // y^2 / (80 g) + (y - 5)^2 with g = ln(y^2 + 2);
      // d/dy [y^2 / g] = 2y / g - 2y^3 / ((y^2 + 2) g^2).
      return LocalCost{
          "paper_f3",
          [](double y) {
            return y * y / (80.0 * std::log(y * y + 2.0)) +
                   (y - 5.0) * (y - 5.0);
          },
          [](double y) {
            const double q = y * y + 2.0;
            const double g = std::log(q);
            const double ratio = 2.0 * y / g - 2.0 * y * y * y / (q * g * g);
            return ratio / 80.0 + 2.0 * (y - 5.0);
          },
          std::nullopt,
          std::nullopt,
      };
    case CostKind::kPaperF4:
      expect_params(kind, params, 0);
      // ln(2 cosh(0.05 y)) + y^2, evaluated without overflow for large |y|.
      return LocalCost{
          "paper_f4",
          [](double y) {
            const double a = std::abs(0.05 * y);
            return a + std::log1p(std::exp(-2.0 * a)) + y * y;
          },
          [](double y) { return 0.05 * std::tanh(0.05 * y) + 2.0 * y; },
          2.0,
          2.0 + 0.05 * 0.05,
      };
  }
  throw ValidationError("unknown cost kind");
}

LocalCost builtin_cost(const std::string& kind,
                       std::span<const double> params) {
  return builtin_cost(parse_cost_kind(kind), params);
}

CostSet paper_costs() {
  const double center = 8.0;
  return {
      builtin_cost(CostKind::kQuadratic, std::span(&center, 1)),
      builtin_cost(CostKind::kPaperF2),
      builtin_cost(CostKind::kPaperF3),
      builtin_cost(CostKind::kPaperF4),
  };
}

double global_cost(const CostSet& costs, double y) {
  double total = 0.0;
  for (const auto& c : costs) total += c.eval(y);
  return total;
}

double global_gradient(const CostSet& costs, double y) {
  double total = 0.0;
  for (const auto& c : costs) total += c.grad(y);
  return total;
}

double minimize_global(const CostSet& costs, Bracket bracket, double tol) {
  if (costs.empty()) throw ValidationError("cost set is empty");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (!(lo < hi)) throw ValidationError("bracket must satisfy lo < hi");
  double g_lo = global_gradient(costs, lo);
  const double g_hi = global_gradient(costs, hi);
  if (std::abs(g_lo) <= tol) return lo;
  if (std::abs(g_hi) <= tol) return hi;
  if ((g_lo < 0.0) == (g_hi < 0.0)) {
    throw ValidationError(
        "global gradient does not change sign on [" + std::to_string(lo) +
        ", " + std::to_string(hi) + "]; widen the bracket");
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double g = global_gradient(costs, mid);
    if (std::abs(g) <= tol) return mid;
    if ((g < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
}

}  // namespace distopt
