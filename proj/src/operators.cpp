#include "wholder/operators.hpp"

#include <cmath>

#include "wholder/error.hpp"
#include "wholder/seminorm.hpp"

namespace wholder {

double iterated_log(int k, double x) { return iterated_log_value(k, x); }

double derivative_envelope(int j, double x_N, const SpaceParams& p) {
  if (j < 0 || j > p.m()) throw ConfigError("envelope order must lie in [0, m]");
  if (!(x_N > 0.0)) throw DomainError("envelope requires x_N > 0");
  const double n = p.n();
  if (p.integer_n() && j == p.n_floor()) return 1.0 + std::fabs(std::log(x_N));
  if (j < n) return std::pow(x_N, -(n - j));
  return 1.0;
}

namespace {

double kernel_bump(double s) { return std::fabs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

MollifiedField::MollifiedField(std::shared_ptr<const Field> base, double eps, MollifierOptions opt)
    : base_(std::move(base)), eps_(eps) {
  if (!(eps > 0.0)) throw ConfigError("mollifier radius must be positive");
  if (!base_) throw ConfigError("mollifier needs a field");
  const auto rule = gauss_rule(-1.0, 1.0, opt.panels);
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    s_.push_back(rule.x[i]);
    w_.push_back(rule.w[i] * kernel_bump(rule.x[i]));
    mass += w_.back();
  }
  for (auto& w : w_) w /= mass;
}

double MollifiedField::value(std::span<const double> x, double t) const {
  if (x.empty()) throw DomainError("empty point");
  const std::size_t tang = x.size() - 1;
  const bool timed = base_->time_dependent();
  const std::size_t axes = tang + (timed ? 1 : 0);
  const std::size_t m = s_.size();
  std::vector<std::size_t> idx(axes, 0);
  std::vector<double> y(x.begin(), x.end());
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < tang; ++a) {
      y[a] = x[a] - eps_ * s_[idx[a]];
      w *= w_[idx[a]];
    }
    double tau = t;
    if (timed) {
      tau = t - eps_ * s_[idx[tang]];
      w *= w_[idx[tang]];
    }
    const double v = base_->value(y, tau);
    if (!std::isfinite(v)) throw QuadratureError("non-finite field value on the mollifier slab");
    sum += w * v;
    std::size_t a = 0;
    while (a < axes && ++idx[a] == m) idx[a++] = 0;
    if (a == axes) break;
  }
  return sum;
}

std::shared_ptr<const MollifiedField> mollify(std::shared_ptr<const Field> u, double eps, MollifierOptions opt) {
  return std::make_shared<const MollifiedField>(std::move(u), eps, opt);
}

std::shared_ptr<const MollifiedField> mollify(const Expression& u, double eps, MollifierOptions opt) {
  return mollify(std::make_shared<const ExpressionField>(u), eps, opt);
}

double mollifier_second_moment(MollifierOptions opt) {
  const auto rule = gauss_rule(-1.0, 1.0, opt.panels);
  double mass = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double k = rule.w[i] * kernel_bump(rule.x[i]);
    mass += k;
    m2 += k * rule.x[i] * rule.x[i];
  }
  return m2 / mass;
}

nlohmann::json GaugeResult::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& [alpha, v] : coefficients) c.push_back({{"alpha", alpha.a}, {"value", json_number(v)}});
  return {{"a", json_number(a)},
          {"b", json_number(b)},
          {"branch", log_branch ? "iterated-log" : "power"},
          {"qtilde", qtilde.to_json()},
          {"q", q.to_json()},
          {"coefficients", c},
          {"time_coefficient", json_number(time_coefficient)},
          {"limit", limit.to_json()}};
}

namespace {

std::size_t resolve_dim(const Expression& u, std::size_t dim) {
  const std::size_t need = u.tangential_span() + 1;
  if (dim == 0) return need;
  if (dim < need) throw ConfigError("dimension too small for the expression");
  return dim;
}

}  // namespace

GaugeResult gauge_tilde(const Expression& u, const SpaceParams& p, std::size_t dim, const LimitOptions& opt) {
  dim = resolve_dim(u, dim);
  const int m = p.m();
  const double n = p.n();
  const Expression g = pre_weight(differentiate(u, MultiIndex::unit(dim, dim - 1, m)), n);
  std::vector<double> x(dim, 0.0);
  GaugeResult r;
  r.limit = boundary_limit(
      [&](double s) {
        x.back() = s;
        return g.evaluate(x, 0.0);
      },
      opt);
  r.a = r.limit.value;
  if (p.integer_n() && p.n_floor() >= 1) {
    const int ni = p.n_floor();
    double fact = 1.0;
    for (int i = 2; i < ni; ++i) fact *= i;
    r.b = ((ni - 1) % 2 == 0 ? 1.0 : -1.0) / fact;
    r.log_branch = true;
    r.qtilde = (r.b * r.a) * Expression::iterated_log(m - ni);
  } else {
    double prod = 1.0;
    for (int i = 0; i < m; ++i) prod *= (m - n - i);
    r.b = 1.0 / prod;
    r.qtilde = (r.b * r.a) * Expression::boundary_power(m - n);
  }
  r.q = r.qtilde;
  return r;
}

Expression shifted_monomial(const MultiIndex& alpha) {
  std::vector<Expression> f;
  const std::size_t dim = alpha.dim();
  for (std::size_t i = 0; i + 1 < dim; ++i)
    if (alpha[i] > 0) f.push_back(Expression::coordinate(static_cast<int>(i), alpha[i]));
  const int k = alpha.normal();
  if (k > 0) {
    std::vector<Expression> terms;
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      const double c = binom * (((k - i) % 2 == 0) ? 1.0 : -1.0);
      terms.push_back(c * (i == 0 ? Expression::constant(1.0) : Expression::boundary_power(i)));
      binom = binom * (k - i) / (i + 1);
    }
    f.push_back(Expression::sum(std::move(terms)));
  }
  if (f.empty()) return Expression::constant(1.0);
  return Expression::product(std::move(f));
}

GaugeResult gauge_full(const Expression& u, const SpaceParams& p, std::size_t dim, const LimitOptions& opt) {
  dim = resolve_dim(u, dim);
  GaugeResult r = gauge_tilde(u, p, dim, opt);
  const Expression resid = u - r.qtilde;
  std::vector<double> e(dim, 0.0);
  e.back() = 1.0;
  std::vector<Expression> terms{r.qtilde};
  const int top = int_part(p.m_minus_n());
  for (int k = 0; k <= top; ++k) {
    for (const auto& alpha : multi_indices(dim, k)) {
      const double a = differentiate(resid, alpha).evaluate(e, 0.0);
      if (!std::isfinite(a)) throw DomainError("gauge coefficient is not finite at the reference point");
      r.coefficients.emplace_back(alpha, a);
      if (a != 0.0) terms.push_back((a / alpha.factorial()) * shifted_monomial(alpha));
    }
  }
  r.time_coefficient = differentiate(resid, MultiIndex(dim), 1).evaluate(e, 0.0);
  if (r.time_coefficient != 0.0) terms.push_back(r.time_coefficient * Expression::time_power(1));
  r.q = Expression::sum(std::move(terms));
  return r;
}

namespace {

void check_trace_order(int j, const SpaceParams& p) {
  if (j < 0 || j > p.m_minus_n() + 1e-12) throw PreconditionError("trace order must satisfy 0 <= j <= m - n");
}

}  // namespace

std::vector<double> trace(const Expression& u, int j, const std::vector<std::vector<double>>& tangential_points,
                          double t, const SpaceParams& p, const LimitOptions& opt) {
  check_trace_order(j, p);
  std::vector<double> out;
  for (const auto& xp : tangential_points) {
    const std::size_t dim = xp.size() + 1;
    const Expression d = differentiate(u, MultiIndex::unit(dim, dim - 1, j));
    std::vector<double> x(xp.begin(), xp.end());
    x.push_back(0.0);
    double v = d.evaluate(x, t);
    if (!std::isfinite(v)) {
      v = boundary_limit(
              [&](double s) {
                x.back() = s;
                return d.evaluate(x, t);
              },
              opt)
              .value;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> trace(std::shared_ptr<const Field> u, int j,
                          const std::vector<std::vector<double>>& tangential_points, double t,
                          const SpaceParams& p, const LimitOptions& opt) {
  check_trace_order(j, p);
  std::vector<double> out;
  for (const auto& xp : tangential_points) {
    const std::size_t dim = xp.size() + 1;
    const auto d = EvaluatorSource(u).derivative(MultiIndex::unit(dim, dim - 1, j), 0, 0.0);
    std::vector<double> x(xp.begin(), xp.end());
    x.push_back(0.0);
    out.push_back(boundary_limit(
                      [&](double s) {
                        x.back() = s;
                        return d->value(x, t);
                      },
                      opt)
                      .value);
  }
  return out;
}

}  // namespace wholder
