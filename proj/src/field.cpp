#include "wholder/field.hpp"

#include <cmath>

#include "wholder/error.hpp"

namespace wholder {

namespace {

std::vector<double> central_stencil(int k) {
  switch (k) {
    case 0: return {1.0};
    case 1: return {-0.5, 0.0, 0.5};
    case 2: return {1.0, -2.0, 1.0};
    case 3: return {-0.5, 1.0, 0.0, -1.0, 0.5};
    case 4: return {1.0, -4.0, 6.0, -4.0, 1.0};
    case 5: return {-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5};
    case 6: return {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0};
    default: throw ConfigError("finite-difference order above 6 is not supported");
  }
}

}  // namespace

DomainGeometry DomainGeometry::make_disk(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("disk radius must be positive");
  DomainGeometry g;
  g.kind = Kind::Disk;
  g.disk = DiskSpec{std::move(center), radius};
  return g;
}

double DomainGeometry::distance(std::span<const double> x) const {
  return is_disk() ? disk.distance(x) : x.back();
}

DistanceValue domain_distance(const DomainGeometry& g, std::span<const double> x) {
  if (x.empty()) throw DomainError("empty point");
  DistanceValue r;
  r.gradient.assign(x.size(), 0.0);
  if (!g.is_disk()) {
    if (x.back() < 0.0) throw DomainError("point outside the half-space");
    r.d = x.back();
    r.gradient.back() = 1.0;
    return r;
  }
  if (g.disk.center.size() != x.size()) throw DomainError("disk dimension mismatch");
  r.d = g.disk.distance(x);
  if (r.d < -1e-14 * g.disk.radius) throw DomainError("point outside the disk");
  r.d = std::max(r.d, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) r.gradient[i] = -(x[i] - g.disk.center[i]) / g.disk.radius;
  return r;
}

FiniteDifferenceField::FiniteDifferenceField(std::shared_ptr<const Field> base, MultiIndex alpha, int time_order,
                                             double step, double normal_fraction)
    : base_(std::move(base)),
      alpha_(std::move(alpha)),
      time_order_(time_order),
      step_(step),
      normal_fraction_(normal_fraction) {
  for (std::size_t ax = 0; ax < alpha_.dim(); ++ax) {
    weights_.push_back(central_stencil(alpha_[ax]));
    radius_.push_back(static_cast<int>(weights_.back().size() / 2));
  }
  weights_.push_back(central_stencil(time_order_));
  radius_.push_back(static_cast<int>(weights_.back().size() / 2));
}

double FiniteDifferenceField::value(std::span<const double> x, double t) const {
  const std::size_t dim = alpha_.dim();
  if (x.size() != dim) throw DomainError("point dimension mismatch");
  std::vector<double> h(dim + 1, step_);
  const int rn = radius_[dim - 1];
  if (rn > 0) {
    if (x[dim - 1] <= 0.0) return non_finite();
    h[dim - 1] = std::min(step_, normal_fraction_ * x[dim - 1] / rn);
  }
  std::vector<int> idx(dim + 1, 0);
  std::vector<double> pt(dim);
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t ax = 0; ax <= dim; ++ax) w *= weights_[ax][idx[ax]];
    if (w != 0.0) {
      for (std::size_t ax = 0; ax < dim; ++ax) pt[ax] = x[ax] + (idx[ax] - radius_[ax]) * h[ax];
      double tt = t + (idx[dim] - radius_[dim]) * h[dim];
      acc += w * base_->value(pt, tt);
    }
    std::size_t ax = 0;
    while (ax <= dim && ++idx[ax] == static_cast<int>(weights_[ax].size())) idx[ax++] = 0;
    if (ax > dim) break;
  }
  double denom = 1.0;
  for (std::size_t ax = 0; ax < dim; ++ax) denom *= std::pow(h[ax], alpha_[ax]);
  denom *= std::pow(h[dim], time_order_);
  return acc / denom;
}

WeightedField::WeightedField(std::shared_ptr<const Field> base, double p, DomainGeometry g)
    : base_(std::move(base)), p_(p), geometry_(std::move(g)) {}

double WeightedField::value(std::span<const double> x, double t) const {
  double v = base_->value(x, t);
  if (p_ == 0.0) return v;
  double d = geometry_.distance(x);
  if (d <= 0.0) {
    if (p_ < 0.0 || !std::isfinite(v)) return non_finite();
    return 0.0;
  }
  return v * std::pow(d, p_);
}

Expression pre_weight(const Expression& e, double p, const DomainGeometry& g) {
  if (p == 0.0) return e;
  if (g.is_disk()) return Expression::distance_power(g.disk, p) * e;
  return Expression::boundary_power(p) * e;
}

Expression ExpressionSource::derivative_expression(const MultiIndex& alpha, int time_order, double pw,
                                                   const DomainGeometry& g) const {
  return pre_weight(differentiate(u_, alpha, time_order), pw, g);
}

std::shared_ptr<const Field> ExpressionSource::derivative(const MultiIndex& alpha, int time_order, double pw,
                                                          const DomainGeometry& g) const {
  return std::make_shared<ExpressionField>(derivative_expression(alpha, time_order, pw, g));
}

std::shared_ptr<const Field> EvaluatorSource::derivative(const MultiIndex& alpha, int time_order, double pw,
                                                         const DomainGeometry& g) const {
  std::shared_ptr<const Field> d = f_;
  if (alpha.order() > 0 || time_order > 0)
    d = std::make_shared<FiniteDifferenceField>(f_, alpha, time_order, step_, normal_fraction_);
  if (pw != 0.0) d = std::make_shared<WeightedField>(d, pw, g);
  return d;
}

}  // namespace wholder
