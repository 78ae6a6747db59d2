#include "wholder/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "wholder/error.hpp"

namespace wholder {

namespace {

constexpr double kSnap = 1e-12;

void enumerate(std::size_t dim, std::size_t axis, int remaining, MultiIndex& cur,
               std::vector<MultiIndex>& out, std::size_t last_axis) {
  if (axis == last_axis) {
    cur[axis] = remaining;
    out.push_back(cur);
    cur[axis] = 0;
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[axis] = k;
    enumerate(dim, axis + 1, remaining - k, cur, out, last_axis);
  }
  cur[axis] = 0;
}

}  // namespace

int MultiIndex::order() const { return std::accumulate(a.begin(), a.end(), 0); }

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int k : a)
    for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ')';
  return os.str();
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis, int k) {
  MultiIndex r(dim);
  r[axis] = k;
  return r;
}

std::vector<MultiIndex> multi_indices(std::size_t dim, int order) {
  std::vector<MultiIndex> out;
  if (dim == 0 || order < 0) return out;
  MultiIndex cur(dim);
  enumerate(dim, 0, order, cur, out, dim - 1);
  return out;
}

std::vector<MultiIndex> tangential_multi_indices(std::size_t dim, int order) {
  std::vector<MultiIndex> out;
  if (dim < 2 || order < 0) return out;
  for (const auto& t : multi_indices(dim - 1, order)) {
    MultiIndex full(dim);
    for (std::size_t i = 0; i + 1 < dim; ++i) full[i] = t[i];
    out.push_back(full);
  }
  return out;
}

double frac_part(double v) {
  double r = v - std::floor(v);
  if (r < kSnap || 1.0 - r < kSnap) return 0.0;
  return r;
}

int int_part(double v) { return static_cast<int>(std::floor(v + kSnap)); }

SpaceParams::SpaceParams(int m, double n, double gamma) : m_(m), n_(n), gamma_(gamma) {
  if (m < 1) throw ConfigError("m must be a positive integer");
  if (!(n >= 0.0) || !(n < m)) throw ConfigError("n must satisfy 0 <= n < m");
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
  integer_n_ = std::abs(n - std::round(n)) < kSnap;
  if (integer_n_) n_ = std::round(n);
  if (!integer_n_) {
    double fn = n - std::floor(n);
    double lim = std::min(fn, 1.0 - fn);
    if (!((1.0 - omega()) * gamma < lim))
      throw ConfigError("parameters violate (1-omega)*gamma < min({n}, 1-{n})");
  }
}

int SpaceParams::n_floor() const { return int_part(n_); }

nlohmann::json SpaceParams::to_json() const {
  return {{"m", m_}, {"n", n_}, {"gamma", gamma_}};
}

SpaceParams SpaceParams::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("gamma"))
    throw ConfigError("params require m, n, gamma");
  return SpaceParams(j.at("m").get<int>(), j.at("n").get<double>(), j.at("gamma").get<double>());
}

std::string SpaceParams::str() const {
  std::ostringstream os;
  os << "(m=" << m_ << ", n=" << n_ << ", gamma=" << gamma_ << ")";
  return os.str();
}

std::vector<SpaceParams> default_param_sets() {
  return {SpaceParams(2, 0.5, 0.5), SpaceParams(2, 1.0, 0.25), SpaceParams(4, 1.0, 0.25)};
}

}  // namespace wholder
