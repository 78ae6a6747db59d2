#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "wholder/expression.hpp"
#include "wholder/field.hpp"
#include "wholder/params.hpp"
#include "wholder/quadrature.hpp"

namespace wholder {

/// ln^{(k)}: L_0 = ln, L_k(0) = 0 for k >= 1.
double iterated_log(int k, double x);

/// Unit-constant growth profile of D_{x_N}^j u near the boundary.
double derivative_envelope(int j, double x_N, const SpaceParams& p);

struct MollifierOptions {
  int panels = 8;  // Gauss panels per kernel axis, 20 nodes each
};

/// Tangential and time mollification; x_N is left alone.
class MollifiedField final : public Field {
 public:
  MollifiedField(std::shared_ptr<const Field> base, double eps, MollifierOptions opt = {});
  [[nodiscard]] double value(std::span<const double> x, double t) const override;
  [[nodiscard]] bool time_dependent() const override { return base_->time_dependent(); }
  [[nodiscard]] double eps() const { return eps_; }

 private:
  std::shared_ptr<const Field> base_;
  double eps_;
  std::vector<double> s_;  // nodes in [-1, 1]
  std::vector<double> w_;  // weights normalized to unit mass
};

std::shared_ptr<const MollifiedField> mollify(std::shared_ptr<const Field> u, double eps,
                                              MollifierOptions opt = {});
std::shared_ptr<const MollifiedField> mollify(const Expression& u, double eps, MollifierOptions opt = {});

/// Second moment of the normalized one-dimensional kernel on [-1, 1].
double mollifier_second_moment(MollifierOptions opt = {});

struct GaugeResult {
  double a = 0.0;
  double b = 0.0;
  bool log_branch = false;
  Expression qtilde;
  Expression q;                               // qtilde only after gauge_tilde
  std::vector<std::pair<MultiIndex, double>> coefficients;  // a_alpha
  double time_coefficient = 0.0;
  LimitResult limit;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// dim = 0 picks the smallest dimension that holds every tangential axis of u.
GaugeResult gauge_tilde(const Expression& u, const SpaceParams& p, std::size_t dim = 0,
                        const LimitOptions& opt = {});
GaugeResult gauge_full(const Expression& u, const SpaceParams& p, std::size_t dim = 0,
                       const LimitOptions& opt = {});

/// (x - e)^alpha with e = (0, ..., 0, 1).
Expression shifted_monomial(const MultiIndex& alpha);

/// D_{x_N}^j u at x_N = 0 for each tangential point.
std::vector<double> trace(const Expression& u, int j, const std::vector<std::vector<double>>& tangential_points,
                          double t, const SpaceParams& p, const LimitOptions& opt = {});
std::vector<double> trace(std::shared_ptr<const Field> u, int j,
                          const std::vector<std::vector<double>>& tangential_points, double t,
                          const SpaceParams& p, const LimitOptions& opt = {});

/// Compactly supported boundary datum on R^{N-1} (N - 1 <= 2), with t as a parameter.
struct BoundaryFunction {
  std::function<double(std::span<const double>, double)> f;
  std::size_t tangent_dim = 1;
  double radius = 1.0;                 // support inside |x'| <= radius
  std::vector<double> breakpoints;     // smoothness breaks, one tangent dimension only
  std::vector<double> singular_points; // breaks that get graded panels
  double max_panel = 1.0;
  bool time_dependent = false;
  nlohmann::json description;

  double operator()(std::span<const double> xp, double t) const { return f(xp, t); }

  /// cos(xi x_1) times a smooth radial window equal to 1 on r_in and 0 beyond r_out.
  static BoundaryFunction windowed_cosine(double xi, double r_in, double r_out, std::size_t tangent_dim = 1);
  /// c times the same window.
  static BoundaryFunction plateau(double c, double r_in, double r_out, std::size_t tangent_dim = 1);
  /// exp(-|x'|^2 / (2 width^2)) times the window.
  static BoundaryFunction windowed_gaussian(double width, double r_in, double r_out, std::size_t tangent_dim = 1);
  /// |x'|^l times the window, one tangent dimension.
  static BoundaryFunction power_kink(double l, double r_in, double r_out);
  /// Restriction of an expression to x_N = 0, assumed supported in |x'| <= radius.
  static BoundaryFunction from_expression(const Expression& e, std::size_t tangent_dim, double radius);
  static BoundaryFunction from_json(const nlohmann::json& j);
};

/// w = eta * P[v], with P the half-space Poisson integral; w(x', 0, t) = v(x', t).
class PoissonExtension final : public Field {
 public:
  PoissonExtension(BoundaryFunction v, std::optional<Expression> cutoff);
  [[nodiscard]] double value(std::span<const double> x, double t) const override;
  [[nodiscard]] bool time_dependent() const override;
  /// P[v] without the cutoff.
  [[nodiscard]] double harmonic(std::span<const double> x, double t) const;
  [[nodiscard]] const BoundaryFunction& boundary() const { return v_; }

 private:
  double integral_1d(double xp, double xn, double t) const;
  double integral_2d(std::span<const double> xp, double xn, double t) const;
  BoundaryFunction v_;
  std::optional<Expression> cutoff_;
};

/// Requires the cutoff to equal 1 on the support cylinder |x'| <= v.radius near the boundary.
std::shared_ptr<const PoissonExtension> poisson_extend(BoundaryFunction v, const SpaceParams& p,
                                                       const std::optional<CutoffSpec>& cutoff = std::nullopt);

}  // namespace wholder
