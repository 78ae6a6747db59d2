#include "wholder/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "wholder/error.hpp"
#include "wholder/seminorm.hpp"

namespace wholder {

namespace {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

void append_panel(QuadratureRule& r, double a, double b) {
  const auto& xs = Gauss20::abscissa();
  const auto& ws = Gauss20::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.x.push_back(c - h * xs[i]);
    r.w.push_back(h * ws[i]);
    if (xs[i] != 0.0) {
      r.x.push_back(c + h * xs[i]);
      r.w.push_back(h * ws[i]);
    }
  }
}

}  // namespace

double QuadratureRule::apply(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
  return s;
}

QuadratureRule gauss_rule(double a, double b, int panels) {
  if (panels < 1) throw ConfigError("panel count must be positive");
  QuadratureRule r;
  for (int p = 0; p < panels; ++p) append_panel(r, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
  return r;
}

QuadratureRule graded_rule(double a, double b, bool grade_left, bool grade_right, int depth) {
  QuadratureRule r;
  if (!(b > a)) return r;
  if (grade_left && grade_right) {
    const double c = 0.5 * (a + b);
    auto l = graded_rule(a, c, true, false, depth);
    auto h = graded_rule(c, b, false, true, depth);
    l.x.insert(l.x.end(), h.x.begin(), h.x.end());
    l.w.insert(l.w.end(), h.w.begin(), h.w.end());
    return l;
  }
  if (!grade_left && !grade_right) {
    append_panel(r, a, b);
    return r;
  }
  const double len = b - a;
  double hi = 1.0;
  for (int k = 0; k < depth; ++k) {
    const double lo = hi * 0.5;
    if (grade_left) append_panel(r, a + len * lo, a + len * hi);
    else append_panel(r, b - len * hi, b - len * lo);
    hi = lo;
  }
  if (grade_left) append_panel(r, a, a + len * hi);
  else append_panel(r, b - len * hi, b);
  return r;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  return gauss_rule(a, b, panels).apply(f);
}

double wynn_epsilon(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n == 0) throw ConfigError("empty sequence");
  if (n < 3) return s.back();
  // columns e_{k-1}, e_k as rolling arrays
  std::vector<double> prev(n + 1, 0.0), cur(s.begin(), s.end());
  double best = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    for (std::size_t i = 0; i + k < n; ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0 || !std::isfinite(d)) {
        // column converged exactly
        return (k % 2 == 1) ? cur[i + 1] : best;
      }
      next[i] = prev[i + 1] + 1.0 / d;
    }
    prev = cur;
    cur = next;
    if (k % 2 == 0) best = cur.back();
  }
  return best;
}

nlohmann::json LimitResult::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (double v : extrapolants) e.push_back(json_number(v));
  return {{"value", json_number(value)}, {"error", json_number(error)}, {"samples", samples}, {"extrapolants", e}};
}

LimitResult boundary_limit(const std::function<double(double)>& g, const LimitOptions& opt) {
  if (!(opt.ratio > 0.0 && opt.ratio < 1.0)) throw ConfigError("limit ratio must lie in (0,1)");
  LimitResult r;
  std::vector<double> s;
  double x = opt.start;
  int agree = 0, shrink = 0;
  for (int j = 0; j < opt.max_samples; ++j, x *= opt.ratio) {
    const double v = g(x);
    if (!std::isfinite(v)) throw NoLimitError("non-finite sample while extracting a boundary limit");
    s.push_back(v);
    if (s.size() >= 3) {
      const double d1 = std::fabs(s[s.size() - 1] - s[s.size() - 2]);
      const double d0 = std::fabs(s[s.size() - 2] - s[s.size() - 3]);
      shrink = (d1 < d0 || d1 == 0.0) ? shrink + 1 : 0;
    }
    const std::size_t lo = s.size() > static_cast<std::size_t>(opt.window) ? s.size() - opt.window : 0;
    const double e = wynn_epsilon(std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(lo), s.end()));
    if (!r.extrapolants.empty()) {
      const double diff = std::fabs(e - r.extrapolants.back());
      agree = diff <= opt.tol * std::max(1.0, std::fabs(e)) ? agree + 1 : 0;
      r.error = diff;
    }
    r.extrapolants.push_back(e);
    if (agree >= opt.confirm && shrink >= opt.confirm) {
      r.value = e;
      r.samples = static_cast<int>(s.size());
      return r;
    }
  }
  throw NoLimitError("boundary limit extrapolation did not converge");
}

}  // namespace wholder
