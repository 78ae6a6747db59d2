#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wholder/expression.hpp"

namespace wholder {

/// Half-space or disk; for the disk d(x) replaces x_N as the boundary distance.
struct DomainGeometry {
  enum class Kind { HalfSpace, Disk };
  Kind kind = Kind::HalfSpace;
  DiskSpec disk;

  static DomainGeometry half_space() { return {}; }
  static DomainGeometry make_disk(std::vector<double> center, double radius);
  [[nodiscard]] bool is_disk() const { return kind == Kind::Disk; }
  /// Boundary distance of x (x_N for the half-space).
  [[nodiscard]] double distance(std::span<const double> x) const;
};

/// Distance and its gradient.
struct DistanceValue {
  double d = 0.0;
  std::vector<double> gradient;
};

DistanceValue domain_distance(const DomainGeometry& g, std::span<const double> x);

/// Point-evaluation contract shared by expressions and numerical evaluators.
class Field {
 public:
  virtual ~Field() = default;
  [[nodiscard]] virtual double value(std::span<const double> x, double t) const = 0;
  [[nodiscard]] virtual bool time_dependent() const { return true; }
};

class ExpressionField final : public Field {
 public:
  explicit ExpressionField(Expression e) : e_(std::move(e)), timed_(e_.depends_on_time()) {}
  [[nodiscard]] double value(std::span<const double> x, double t) const override {
    return e_.evaluate(x, t);
  }
  [[nodiscard]] bool time_dependent() const override { return timed_; }
  [[nodiscard]] const Expression& expression() const { return e_; }

 private:
  Expression e_;
  bool timed_;
};

/// Wraps a callable.
class FunctionField final : public Field {
 public:
  using Fn = std::function<double(std::span<const double>, double)>;
  FunctionField(Fn fn, bool time_dependent) : fn_(std::move(fn)), timed_(time_dependent) {}
  [[nodiscard]] double value(std::span<const double> x, double t) const override { return fn_(x, t); }
  [[nodiscard]] bool time_dependent() const override { return timed_; }

 private:
  Fn fn_;
  bool timed_;
};

/// Central finite-difference stencil for D_x^alpha D_t^k of a field, second order accurate.
/// Normal steps shrink with x_N so the stencil stays in x_N > 0; x_N = 0 yields the non-finite marker.
class FiniteDifferenceField final : public Field {
 public:
  FiniteDifferenceField(std::shared_ptr<const Field> base, MultiIndex alpha, int time_order,
                        double step = 1e-3, double normal_fraction = 0.1);
  [[nodiscard]] double value(std::span<const double> x, double t) const override;
  [[nodiscard]] bool time_dependent() const override { return base_->time_dependent(); }

 private:
  std::shared_ptr<const Field> base_;
  MultiIndex alpha_;
  int time_order_;
  double step_;
  double normal_fraction_;
  std::vector<std::vector<double>> weights_;  // per axis, then time
  std::vector<int> radius_;
};

/// Product with a boundary-distance power d(x)^p.
class WeightedField final : public Field {
 public:
  WeightedField(std::shared_ptr<const Field> base, double p, DomainGeometry g = {});
  [[nodiscard]] double value(std::span<const double> x, double t) const override;
  [[nodiscard]] bool time_dependent() const override { return base_->time_dependent(); }

 private:
  std::shared_ptr<const Field> base_;
  double p_;
  DomainGeometry geometry_;
};

/// Supplies pre-weighted derivatives d^p D_x^alpha D_t^k u of one underlying function.
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  [[nodiscard]] virtual std::shared_ptr<const Field> derivative(const MultiIndex& alpha, int time_order,
                                                                double pre_weight,
                                                                const DomainGeometry& g = {}) const = 0;
  [[nodiscard]] virtual bool time_dependent() const = 0;
  [[nodiscard]] virtual bool symbolic() const { return false; }
};

/// Exact symbolic derivatives with symbolic pre-weighting.
class ExpressionSource final : public FieldSource {
 public:
  explicit ExpressionSource(Expression u) : u_(std::move(u)) {}
  [[nodiscard]] std::shared_ptr<const Field> derivative(const MultiIndex& alpha, int time_order,
                                                        double pre_weight,
                                                        const DomainGeometry& g = {}) const override;
  [[nodiscard]] Expression derivative_expression(const MultiIndex& alpha, int time_order, double pre_weight,
                                                 const DomainGeometry& g = {}) const;
  [[nodiscard]] bool time_dependent() const override { return u_.depends_on_time(); }
  [[nodiscard]] bool symbolic() const override { return true; }
  [[nodiscard]] const Expression& expression() const { return u_; }

 private:
  Expression u_;
};

/// Finite-difference derivatives of a numerical evaluator.
class EvaluatorSource final : public FieldSource {
 public:
  explicit EvaluatorSource(std::shared_ptr<const Field> f, double step = 1e-3, double normal_fraction = 0.1)
      : f_(std::move(f)), step_(step), normal_fraction_(normal_fraction) {}
  [[nodiscard]] std::shared_ptr<const Field> derivative(const MultiIndex& alpha, int time_order,
                                                        double pre_weight,
                                                        const DomainGeometry& g = {}) const override;
  [[nodiscard]] bool time_dependent() const override { return f_->time_dependent(); }

 private:
  std::shared_ptr<const Field> f_;
  double step_;
  double normal_fraction_;
};

/// Pre-weighted expression d^p * e (d = x_N on the half-space).
Expression pre_weight(const Expression& e, double p, const DomainGeometry& g = {});

}  // namespace wholder
