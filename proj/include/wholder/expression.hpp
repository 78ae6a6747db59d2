#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wholder/params.hpp"

namespace wholder {

/// Radial piecewise-polynomial cutoff in s = sum_i w_i (x_i - c_i)^2 + w_t (t - c_t)^2.
/// Equal to 1 for s <= r_inner^2, 0 for s >= r_outer^2, smoothstep of degree 2*order+1 between.
struct CutoffSpec {
  std::vector<double> center;
  std::vector<double> weights;  // empty means all ones
  double t_center = 0.0;
  double t_weight = 0.0;
  double r_inner = 0.5;
  double r_outer = 1.0;
  int order = 3;

  [[nodiscard]] double weight(std::size_t axis) const {
    return weights.empty() ? 1.0 : weights[axis];
  }
  [[nodiscard]] double radial(std::span<const double> x, double t) const;
  /// k-th derivative of the profile with respect to s.
  [[nodiscard]] double profile(double s, int k) const;
  bool operator==(const CutoffSpec&) const = default;
};

/// Disk used for the closed-form distance d(x) = (R^2 - |x - c|^2) / (2R).
struct DiskSpec {
  std::vector<double> center;
  double radius = 1.0;

  [[nodiscard]] double distance(std::span<const double> x) const;
  bool operator==(const DiskSpec&) const = default;
};

/// Marker returned by evaluation when a term blows up on the boundary.
double non_finite();

struct Canonical;

/// Immutable symbolic field on the closed half-space times R, closed under differentiation.
/// Tangential axes are 0-based (axis 0 is x_1); the last coordinate of a point is x_N.
class Expression {
 public:
  enum class Kind {
    Constant,
    Coordinate,
    BoundaryPower,
    IteratedLog,
    TimePower,
    Cutoff,
    DistancePower,
    Sum,
    Product,
    Scale
  };

  Expression();

  static Expression constant(double c);
  static Expression coordinate(int axis, int power = 1);
  static Expression boundary_power(double a);
  static Expression iterated_log(int level);
  static Expression time_power(int q);
  /// No smoothness validation; see make_cutoff for the checked constructor.
  static Expression cutoff(const CutoffSpec& spec, int derivative = 0);
  static Expression distance_power(const DiskSpec& disk, double a);
  static Expression sum(std::vector<Expression> terms);
  static Expression product(std::vector<Expression> factors);
  static Expression scale(double factor, const Expression& e);

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] const std::vector<Expression>& children() const;
  [[nodiscard]] double number() const;  // constant value, exponent, or scale factor
  [[nodiscard]] int index() const;      // axis, level, power or derivative order
  [[nodiscard]] int power() const;      // coordinate power

  [[nodiscard]] double evaluate(std::span<const double> x, double t = 0.0) const;
  [[nodiscard]] bool depends_on_time() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] std::size_t term_count() const;
  /// Largest tangential axis referenced plus one.
  [[nodiscard]] std::size_t tangential_span() const;
  [[nodiscard]] const Canonical& canonical() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static Expression from_json(const nlohmann::json& j);
  [[nodiscard]] std::string str() const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend Expression from_canonical(Canonical c);
};

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator*(const Expression& a, const Expression& b);
Expression operator*(double c, const Expression& e);

/// Builds the sum-of-products tree for a canonical form.
Expression from_canonical(Canonical c);

/// Exact derivative D_x^alpha D_t^time_order e.
Expression differentiate(const Expression& e, const MultiIndex& alpha, int time_order = 0);

inline double evaluate(const Expression& e, std::span<const double> x, double t = 0.0) {
  return e.evaluate(x, t);
}

/// Checked cutoff: requires r_inner < r_outer and order >= m + 1.
Expression make_cutoff(const CutoffSpec& spec, const SpaceParams& params);

/// Substitutes x_axis -> factor * x_axis (axis == dim-1 rescales x_N).
Expression rescale_axis(const Expression& e, std::size_t axis, std::size_t dim, double factor);

/// Max |central difference - symbolic derivative| over a probe set in x_N > 0.
double fd_consistency(const Expression& e, const MultiIndex& alpha, double h,
                      const std::vector<std::vector<double>>& probes, double t = 0.0);
/// Same with a default probe set of the given dimension.
double fd_consistency(const Expression& e, const MultiIndex& alpha, double h);

/// Closed-form L_k(x) = x^k/k! ln x - c_k x^k; L_0 = ln.
double iterated_log_value(int k, double x);
/// The recurrence constant c_k.
double iterated_log_constant(int k);

}  // namespace wholder
