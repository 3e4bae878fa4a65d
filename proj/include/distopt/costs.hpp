#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace distopt {

// Differentiable scalar local cost f_i with an analytic gradient.
struct LocalCost {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double)> grad;
  // Strong convexity / gradient Lipschitz constants when known globally.
  std::optional<double> convexity_lower;
  std::optional<double> lipschitz_upper;

  double operator()(double y) const { return eval(y); }
};

using CostSet = std::vector<LocalCost>;

enum class CostKind { kQuadratic, kConsensus, kPaperF2, kPaperF3, kPaperF4 };

// Parses "quadratic", "consensus", "paper_f2", ... Throws ValidationError.
CostKind parse_cost_kind(const std::string& name);
const char* to_string(CostKind kind);

// quadratic(c) / consensus(y0): (y - c)^2, one parameter.
// paper_f2: y^2 / (20 sqrt(y^2 + 1)) + y^2
// paper_f3: y^2 / (80 ln(y^2 + 2)) + (y - 5)^2
// paper_f4: ln(exp(-0.05 y) + exp(0.05 y)) + y^2
// The paper_* kinds take no parameters.
LocalCost builtin_cost(CostKind kind, std::span<const double> params = {});
LocalCost builtin_cost(const std::string& kind,
                       std::span<const double> params = {});

// The four local costs of the Van der Pol network example, in agent order.
CostSet paper_costs();

double global_cost(const CostSet& costs, double y);
double global_gradient(const CostSet& costs, double y);

struct Bracket {
  double lo;
  double hi;
};

// Bisection on the monotone global gradient. Returns y* with
// |sum_i grad f_i(y*)| <= tol, or the midpoint of a bracket that has shrunk
// to machine resolution. Throws ValidationError when the gradient does not
// change sign over the bracket.
double minimize_global(const CostSet& costs, Bracket bracket = {-100.0, 100.0},
                       double tol = 1e-10);

}  // namespace distopt
