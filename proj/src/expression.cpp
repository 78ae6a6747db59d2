#include "wholder/expression.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "canonical.hpp"
#include "wholder/error.hpp"

namespace wholder {

struct Expression::Node {
  Kind kind = Kind::Constant;
  double num = 0.0;
  int idx = 0;
  int pow = 0;
  std::shared_ptr<const CutoffSpec> cutoff;
  std::shared_ptr<const DiskSpec> disk;
  std::vector<Expression> children;
  Canonical canon;
};

namespace {

using Node = Expression::Node;

constexpr int kMaxSmoothOrder = 24;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficients of the generalized smoothstep S_q(x) = x^{q+1} sum_j C(q+j,j) C(2q+1,q-j) (-x)^j.
const std::vector<double>& smoothstep_coeffs(int q) {
  static const auto table = [] {
    std::array<std::vector<double>, kMaxSmoothOrder + 1> t;
    for (int order = 0; order <= kMaxSmoothOrder; ++order) {
      std::vector<double> c(2 * order + 2, 0.0);
      for (int j = 0; j <= order; ++j) {
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        c[order + 1 + j] = sign * binom(order + j, j) * binom(2 * order + 1, order - j);
      }
      t[order] = std::move(c);
    }
    return t;
  }();
  return table.at(q);
}

double smoothstep_derivative(int q, int k, double x) {
  const auto& c = smoothstep_coeffs(q);
  const int deg = static_cast<int>(c.size()) - 1;
  if (k > deg) return 0.0;
  double acc = 0.0;
  for (int i = deg; i >= k; --i) {
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= (i - j);
    acc = acc * x + c[i] * f;
  }
  return acc;
}

Canonical single(Monomial m, double coeff = 1.0) {
  Canonical c;
  c.terms.push_back(Term{coeff, std::move(m)});
  c.normalize();
  return c;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

nlohmann::json spec_json(const CutoffSpec& s) {
  nlohmann::json j = {{"center", s.center},
                      {"r_inner", s.r_inner},
                      {"r_outer", s.r_outer},
                      {"order", s.order}};
  if (!s.weights.empty()) j["weights"] = s.weights;
  if (s.t_weight != 0.0) {
    j["t_center"] = s.t_center;
    j["t_weight"] = s.t_weight;
  }
  return j;
}

CutoffSpec spec_from_json(const nlohmann::json& j) {
  CutoffSpec s;
  s.center = j.at("center").get<std::vector<double>>();
  if (j.contains("weights")) s.weights = j.at("weights").get<std::vector<double>>();
  s.t_center = j.value("t_center", 0.0);
  s.t_weight = j.value("t_weight", 0.0);
  s.r_inner = j.at("r_inner").get<double>();
  s.r_outer = j.at("r_outer").get<double>();
  s.order = j.at("order").get<int>();
  if (!(s.r_inner > 0.0) || !(s.r_outer > s.r_inner))
    throw ConfigError("cutoff requires 0 < r_inner < r_outer");
  if (s.order < 0 || s.order > kMaxSmoothOrder) throw ConfigError("cutoff order out of range");
  if (!s.weights.empty() && s.weights.size() != s.center.size())
    throw ConfigError("cutoff weights must match center dimension");
  return s;
}

const char* kind_name(Expression::Kind k) {
  switch (k) {
    case Expression::Kind::Constant: return "constant";
    case Expression::Kind::Coordinate: return "coordinate";
    case Expression::Kind::BoundaryPower: return "boundary-power";
    case Expression::Kind::IteratedLog: return "iterated-log";
    case Expression::Kind::TimePower: return "time-power";
    case Expression::Kind::Cutoff: return "cutoff";
    case Expression::Kind::DistancePower: return "distance-power";
    case Expression::Kind::Sum: return "sum";
    case Expression::Kind::Product: return "product";
    case Expression::Kind::Scale: return "scale";
  }
  return "?";
}

// Central second-order stencil weights for the k-th derivative on offsets -r..r.
std::vector<double> central_weights(int k, int r) {
  const int n = 2 * r + 1;
  std::vector<double> off(n);
  for (int i = 0; i < n; ++i) off[i] = i - r;
  // Fornberg's algorithm at z = 0.
  std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
  double c1 = 1.0;
  double c4 = off[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, k);
    double c2 = 1.0;
    double c5 = c4;
    c4 = off[i];
    for (int j = 0; j < i; ++j) {
      double c3 = off[i] - off[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s) c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int s = mn; s >= 1; --s) c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][k];
  return w;
}

}  // namespace

double non_finite() { return std::numeric_limits<double>::infinity(); }

double iterated_log_constant(int k) {
  double c = 0.0;
  double fact = 1.0;
  for (int i = 1; i <= k; ++i) {
    fact *= i;
    c = c / i + 1.0 / (i * fact);
  }
  return c;
}

double iterated_log_value(int k, double x) {
  if (k < 0) throw DomainError("iterated log level must be nonnegative");
  if (x < 0.0 || (x == 0.0 && k == 0)) throw DomainError("iterated log requires x > 0");
  if (x == 0.0) return 0.0;
  if (k == 0) return std::log(x);
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  double xk = std::pow(x, k);
  return xk / fact * std::log(x) - iterated_log_constant(k) * xk;
}

double CutoffSpec::radial(std::span<const double> x, double t) const {
  double s = 0.0;
  const std::size_t n = std::min(center.size(), x.size());
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - center[i];
    s += weight(i) * d * d;
  }
  if (t_weight != 0.0) {
    double d = t - t_center;
    s += t_weight * d * d;
  }
  return s;
}

double CutoffSpec::profile(double s, int k) const {
  const double s_in = r_inner * r_inner;
  const double s_out = r_outer * r_outer;
  if (s <= s_in) return k == 0 ? 1.0 : 0.0;
  if (s >= s_out) return 0.0;
  const double width = s_out - s_in;
  const double sigma = (s - s_in) / width;
  if (k == 0) return 1.0 - smoothstep_derivative(order, 0, sigma);
  return -smoothstep_derivative(order, k, sigma) / std::pow(width, k);
}

double DiskSpec::distance(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < center.size() && i < x.size(); ++i) {
    double d = x[i] - center[i];
    r2 += d * d;
  }
  return (radius * radius - r2) / (2.0 * radius);
}

Expression::Expression() : Expression(constant(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->num = c;
  n->canon = single(Monomial{}, c);
  return Expression(n);
}

Expression Expression::coordinate(int axis, int power) {
  if (axis < 0 || power < 0) throw ConfigError("coordinate monomial needs axis >= 0 and power >= 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Coordinate;
  n->idx = axis;
  n->pow = power;
  Monomial m;
  m.mono.assign(axis + 1, 0);
  m.mono[axis] = power;
  n->canon = single(std::move(m));
  return Expression(n);
}

Expression Expression::boundary_power(double a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::BoundaryPower;
  n->num = a;
  Monomial m;
  m.bpow = a;
  n->canon = single(std::move(m));
  return Expression(n);
}

Expression Expression::iterated_log(int level) {
  if (level < 0) throw ConfigError("iterated log level must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::IteratedLog;
  n->idx = level;
  Monomial m;
  m.logs = {level};
  n->canon = single(std::move(m));
  return Expression(n);
}

Expression Expression::time_power(int q) {
  if (q < 0) throw ConfigError("time power must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::TimePower;
  n->idx = q;
  Monomial m;
  m.tpow = q;
  n->canon = single(std::move(m));
  return Expression(n);
}

Expression Expression::cutoff(const CutoffSpec& spec, int derivative) {
  if (!(spec.r_inner > 0.0) || !(spec.r_outer > spec.r_inner))
    throw ConfigError("cutoff requires 0 < r_inner < r_outer");
  if (spec.order < 0 || spec.order > kMaxSmoothOrder) throw ConfigError("cutoff order out of range");
  if (!spec.weights.empty() && spec.weights.size() != spec.center.size())
    throw ConfigError("cutoff weights must match center dimension");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cutoff;
  n->idx = derivative;
  n->cutoff = std::make_shared<const CutoffSpec>(spec);
  Monomial m;
  m.cutoffs.push_back(CutoffFactor{n->cutoff, derivative});
  n->canon = single(std::move(m));
  return Expression(n);
}

Expression Expression::distance_power(const DiskSpec& disk, double a) {
  if (!(disk.radius > 0.0)) throw ConfigError("disk radius must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::DistancePower;
  n->num = a;
  n->disk = std::make_shared<const DiskSpec>(disk);
  Monomial m;
  m.disk = n->disk;
  m.dpow = a;
  n->canon = single(std::move(m));
  return Expression(n);
}

Expression Expression::sum(std::vector<Expression> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  for (const auto& t : terms)
    n->canon.terms.insert(n->canon.terms.end(), t.node_->canon.terms.begin(), t.node_->canon.terms.end());
  n->canon.normalize();
  n->children = std::move(terms);
  return Expression(n);
}

Expression Expression::product(std::vector<Expression> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  Canonical acc = factors.front().node_->canon;
  for (std::size_t i = 1; i < factors.size(); ++i) acc = multiply(acc, factors[i].node_->canon);
  n->canon = std::move(acc);
  n->children = std::move(factors);
  return Expression(n);
}

Expression Expression::scale(double factor, const Expression& e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->num = factor;
  n->canon = wholder::scale(e.node_->canon, factor);
  n->children = {e};
  return Expression(n);
}

Expression::Kind Expression::kind() const { return node_->kind; }
const std::vector<Expression>& Expression::children() const { return node_->children; }
double Expression::number() const { return node_->num; }
int Expression::index() const { return node_->idx; }
int Expression::power() const { return node_->pow; }
const Canonical& Expression::canonical() const { return node_->canon; }

double Expression::evaluate(std::span<const double> x, double t) const {
  return node_->canon.evaluate(x, t);
}

bool Expression::depends_on_time() const { return node_->canon.time_dependent(); }
bool Expression::is_zero() const { return node_->canon.terms.empty(); }
std::size_t Expression::term_count() const { return node_->canon.terms.size(); }

std::size_t Expression::tangential_span() const {
  std::size_t s = 0;
  for (const auto& t : node_->canon.terms) s = std::max(s, t.m.mono.size());
  return s;
}

Expression from_canonical(Canonical c) {
  if (c.terms.empty()) return Expression::constant(0.0);
  std::vector<Expression> parts;
  parts.reserve(c.terms.size());
  for (const auto& t : c.terms) {
    std::vector<Expression> f;
    for (std::size_t i = 0; i < t.m.mono.size(); ++i)
      if (t.m.mono[i]) f.push_back(Expression::coordinate(static_cast<int>(i), t.m.mono[i]));
    if (t.m.bpow != 0.0) f.push_back(Expression::boundary_power(t.m.bpow));
    for (int k : t.m.logs) f.push_back(Expression::iterated_log(k));
    if (t.m.tpow) f.push_back(Expression::time_power(t.m.tpow));
    for (const auto& cf : t.m.cutoffs) f.push_back(Expression::cutoff(*cf.spec, cf.derivative));
    if (t.m.disk) f.push_back(Expression::distance_power(*t.m.disk, t.m.dpow));
    Expression body = f.empty() ? Expression::constant(1.0) : Expression::product(std::move(f));
    parts.push_back(t.coeff == 1.0 ? body : Expression::scale(t.coeff, body));
  }
  if (parts.size() == 1) return parts.front();
  auto n = std::make_shared<Node>();
  n->kind = Expression::Kind::Sum;
  n->children = std::move(parts);
  n->canon = std::move(c);
  return Expression(n);
}

Expression operator+(const Expression& a, const Expression& b) { return Expression::sum({a, b}); }
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::sum({a, Expression::scale(-1.0, b)});
}
Expression operator-(const Expression& a) { return Expression::scale(-1.0, a); }
Expression operator*(const Expression& a, const Expression& b) { return Expression::product({a, b}); }
Expression operator*(double c, const Expression& e) { return Expression::scale(c, e); }

Expression differentiate(const Expression& e, const MultiIndex& alpha, int time_order) {
  if (time_order < 0) throw ConfigError("time order must be nonnegative");
  bool trivial = time_order == 0;
  for (int k : alpha.a) {
    if (k < 0) throw ConfigError("multi-index entries must be nonnegative");
    trivial = trivial && k == 0;
  }
  if (trivial) return e;
  Canonical c = e.canonical();
  const std::size_t dim = alpha.dim();
  for (std::size_t ax = 0; ax < dim; ++ax)
    for (int k = 0; k < alpha[ax] && !c.terms.empty(); ++k) c = diff_axis(c, static_cast<int>(ax), dim);
  for (int k = 0; k < time_order && !c.terms.empty(); ++k) c = diff_axis(c, -1, dim);
  return from_canonical(std::move(c));
}

Expression make_cutoff(const CutoffSpec& spec, const SpaceParams& params) {
  if (!(spec.r_inner < spec.r_outer)) throw ConfigError("cutoff requires r_inner < r_outer");
  if (spec.order < params.m() + 1) throw ConfigError("cutoff order must be at least m + 1");
  return Expression::cutoff(spec);
}

Expression rescale_axis(const Expression& e, std::size_t axis, std::size_t dim, double factor) {
  if (!(factor > 0.0)) throw ConfigError("rescale factor must be positive");
  const bool normal = axis + 1 == dim;
  Canonical out;
  for (const auto& t : e.canonical().terms) {
    if (t.m.disk) throw ConfigError("rescaling distance powers is not supported");
    Term base = t;
    for (auto& cf : base.m.cutoffs) {
      CutoffSpec s = *cf.spec;
      if (s.weights.empty()) s.weights.assign(s.center.size(), 1.0);
      s.weights.at(axis) *= factor * factor;
      s.center.at(axis) /= factor;
      cf.spec = std::make_shared<const CutoffSpec>(std::move(s));
    }
    if (!normal) {
      if (axis < base.m.mono.size()) base.coeff *= std::pow(factor, base.m.mono[axis]);
      out.terms.push_back(std::move(base));
      continue;
    }
    base.coeff *= std::pow(factor, base.m.bpow);
    // L_k(f x) = f^k (L_k(x) + ln f x^k / k!)
    std::vector<Term> partial{base};
    partial.front().m.logs.clear();
    for (int k : t.m.logs) {
      double fk = std::pow(factor, k);
      double fact = 1.0;
      for (int i = 2; i <= k; ++i) fact *= i;
      std::vector<Term> next;
      for (const auto& p : partial) {
        Term keep = p;
        keep.coeff *= fk;
        keep.m.logs.push_back(k);
        next.push_back(std::move(keep));
        Term shift = p;
        shift.coeff *= fk * std::log(factor) / fact;
        shift.m.bpow += k;
        if (shift.coeff != 0.0) next.push_back(std::move(shift));
      }
      partial = std::move(next);
    }
    out.terms.insert(out.terms.end(), partial.begin(), partial.end());
  }
  out.normalize();
  return from_canonical(std::move(out));
}

double fd_consistency(const Expression& e, const MultiIndex& alpha, double h,
                      const std::vector<std::vector<double>>& probes, double t) {
  if (!(h > 0.0)) throw ConfigError("step must be positive");
  const std::size_t dim = alpha.dim();
  Expression exact = differentiate(e, alpha);
  std::vector<std::vector<double>> w(dim);
  std::vector<int> r(dim);
  for (std::size_t ax = 0; ax < dim; ++ax) {
    r[ax] = alpha[ax] == 0 ? 0 : (alpha[ax] + 1) / 2;
    w[ax] = alpha[ax] == 0 ? std::vector<double>{1.0} : central_weights(alpha[ax], r[ax]);
  }
  double worst = 0.0;
  std::vector<double> pt(dim);
  for (const auto& p : probes) {
    if (p.size() != dim) throw ConfigError("probe dimension mismatch");
    if (p[dim - 1] - r[dim - 1] * h <= 0.0) throw ConfigError("stencil leaves x_N > 0");
    double acc = 0.0;
    std::vector<int> idx(dim, 0);
    while (true) {
      double wt = 1.0;
      for (std::size_t ax = 0; ax < dim; ++ax) {
        wt *= w[ax][idx[ax]];
        pt[ax] = p[ax] + (idx[ax] - r[ax]) * h;
      }
      if (wt != 0.0) acc += wt * e.evaluate(pt, t);
      std::size_t ax = 0;
      while (ax < dim && ++idx[ax] == static_cast<int>(w[ax].size())) idx[ax++] = 0;
      if (ax == dim) break;
    }
    acc /= std::pow(h, alpha.order());
    worst = std::max(worst, std::abs(acc - exact.evaluate(p, t)));
  }
  return worst;
}

double fd_consistency(const Expression& e, const MultiIndex& alpha, double h) {
  const std::size_t dim = alpha.dim();
  std::vector<std::vector<double>> probes;
  const double tang[] = {-0.6, 0.15, 0.7};
  const double norm[] = {0.4, 0.9, 1.3};
  std::vector<int> idx(dim, 0);
  while (true) {
    std::vector<double> p(dim);
    for (std::size_t ax = 0; ax < dim; ++ax) p[ax] = (ax + 1 == dim) ? norm[idx[ax]] : tang[idx[ax]];
    probes.push_back(std::move(p));
    std::size_t ax = 0;
    while (ax < dim && ++idx[ax] == 3) idx[ax++] = 0;
    if (ax == dim) break;
  }
  return fd_consistency(e, alpha, h, probes, 0.3);
}

nlohmann::json Expression::to_json() const {
  const Node& n = *node_;
  nlohmann::json j = {{"kind", kind_name(n.kind)}};
  switch (n.kind) {
    case Kind::Constant: j["value"] = n.num; break;
    case Kind::Coordinate:
      j["axis"] = n.idx;
      j["power"] = n.pow;
      break;
    case Kind::BoundaryPower: j["exponent"] = n.num; break;
    case Kind::IteratedLog: j["level"] = n.idx; break;
    case Kind::TimePower: j["power"] = n.idx; break;
    case Kind::Cutoff:
      j["spec"] = spec_json(*n.cutoff);
      if (n.idx) j["derivative"] = n.idx;
      break;
    case Kind::DistancePower:
      j["center"] = n.disk->center;
      j["radius"] = n.disk->radius;
      j["exponent"] = n.num;
      break;
    case Kind::Scale: j["factor"] = n.num; [[fallthrough]];
    case Kind::Sum:
    case Kind::Product: {
      nlohmann::json ch = nlohmann::json::array();
      for (const auto& c : n.children) ch.push_back(c.to_json());
      j["children"] = ch;
      break;
    }
  }
  return j;
}

Expression Expression::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("expression node requires a kind");
  const std::string kind = j.at("kind").get<std::string>();
  auto kids = [&] {
    std::vector<Expression> out;
    if (!j.contains("children") || !j.at("children").is_array())
      throw ConfigError("composite node requires children");
    for (const auto& c : j.at("children")) out.push_back(from_json(c));
    return out;
  };
  try {
    if (kind == "constant") return constant(j.at("value").get<double>());
    if (kind == "coordinate") return coordinate(j.at("axis").get<int>(), j.value("power", 1));
    if (kind == "boundary-power") return boundary_power(j.at("exponent").get<double>());
    if (kind == "iterated-log") return iterated_log(j.at("level").get<int>());
    if (kind == "time-power") return time_power(j.at("power").get<int>());
    if (kind == "cutoff") return cutoff(spec_from_json(j.at("spec")), j.value("derivative", 0));
    if (kind == "distance-power") {
      DiskSpec d{j.at("center").get<std::vector<double>>(), j.at("radius").get<double>()};
      return distance_power(d, j.at("exponent").get<double>());
    }
    if (kind == "sum") return sum(kids());
    if (kind == "product") return product(kids());
    if (kind == "scale") {
      auto c = kids();
      if (c.size() != 1) throw ConfigError("scale node takes one child");
      return scale(j.at("factor").get<double>(), c.front());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed expression node: ") + ex.what());
  }
  throw ConfigError("unknown expression kind: " + kind);
}

std::string Expression::str() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: return fmt_num(n.num);
    case Kind::Coordinate: return "x" + std::to_string(n.idx + 1) + (n.pow == 1 ? "" : "^" + std::to_string(n.pow));
    case Kind::BoundaryPower: return "xN^" + fmt_num(n.num);
    case Kind::IteratedLog: return "L" + std::to_string(n.idx) + "(xN)";
    case Kind::TimePower: return "t^" + std::to_string(n.idx);
    case Kind::Cutoff: return n.idx ? "eta^(" + std::to_string(n.idx) + ")" : "eta";
    case Kind::DistancePower: return "d^" + fmt_num(n.num);
    case Kind::Scale: return fmt_num(n.num) + "*" + n.children.front().str();
    case Kind::Sum:
    case Kind::Product: {
      std::string out = "(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += n.kind == Kind::Sum ? " + " : "*";
        out += n.children[i].str();
      }
      return out + ")";
    }
  }
  return "?";
}

}  // namespace wholder
