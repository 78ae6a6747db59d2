#pragma once

#include <functional>
#include <vector>

#include "json.hpp"

namespace wholder {

/// Nodes and weights of a composite rule.
struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
  [[nodiscard]] double apply(const std::function<double(double)>& f) const;
};

/// 20-point Gauss-Legendre on each of `panels` equal panels of [a, b].
QuadratureRule gauss_rule(double a, double b, int panels = 1);
/// Gauss panels on [a, b] refined geometrically toward the flagged endpoints.
QuadratureRule graded_rule(double a, double b, bool grade_left, bool grade_right, int depth = 30);

double integrate(const std::function<double(double)>& f, double a, double b, int panels = 1);

/// Wynn epsilon estimate of the limit of a sequence.
double wynn_epsilon(const std::vector<double>& s);

struct LimitOptions {
  double start = 0.5;
  double ratio = 0.5;
  int max_samples = 48;
  double tol = 1e-8;
  int confirm = 3;
  int window = 7;  // samples fed to each extrapolation
};

struct LimitResult {
  double value = 0.0;
  double error = 0.0;
  int samples = 0;
  std::vector<double> extrapolants;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Limit of g(x) as x -> 0+ from g(start ratio^j). Throws NoLimitError when the accelerated
/// sequence fails the Cauchy test or the raw differences stop shrinking.
LimitResult boundary_limit(const std::function<double(double)>& g, const LimitOptions& opt = {});

}  // namespace wholder
