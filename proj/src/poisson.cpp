#include <algorithm>
#include <cmath>
#include <numbers>

#include "wholder/error.hpp"
#include "wholder/operators.hpp"

namespace wholder {

namespace {

constexpr double kInner = 5.0;  // inner region |y - x'| <= kInner x_N

double window(double r, double r_in, double r_out) {
  CutoffSpec s;
  s.center = {0.0};
  s.r_inner = r_in;
  s.r_outer = r_out;
  return s.profile(r * r, 0);
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void check_window(double r_in, double r_out) {
  if (!(r_in > 0.0 && r_in < r_out)) throw ConfigError("window requires 0 < r_in < r_out");
}

struct Cut {
  double at;
  bool singular;
};

/// Sum of f over [cuts.front(), cuts.back()], splitting pieces wider than max_width.
double integrate_pieces(std::vector<Cut> cuts, const std::function<double(double)>& f, double max_width) {
  std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.at < b.at; });
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i].at, b = cuts[i + 1].at;
    if (!(b > a)) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int k = 0; k < pieces; ++k) {
      const double lo = a + (b - a) * k / pieces, hi = a + (b - a) * (k + 1) / pieces;
      const bool gl = k == 0 && cuts[i].singular;
      const bool gr = k == pieces - 1 && cuts[i + 1].singular;
      sum += graded_rule(lo, hi, gl, gr).apply(f);
    }
  }
  return sum;
}

bool is_singular(const BoundaryFunction& v, double b) {
  return std::find(v.singular_points.begin(), v.singular_points.end(), b) != v.singular_points.end();
}

}  // namespace

BoundaryFunction BoundaryFunction::windowed_cosine(double xi, double r_in, double r_out, std::size_t tangent_dim) {
  check_window(r_in, r_out);
  BoundaryFunction v;
  v.f = [=](std::span<const double> x, double) { return std::cos(xi * x[0]) * window(norm(x), r_in, r_out); };
  v.tangent_dim = tangent_dim;
  v.radius = r_out;
  v.breakpoints = {-r_out, -r_in, r_in, r_out};
  v.max_panel = std::min(1.0, xi != 0.0 ? 1.0 / std::fabs(xi) : 1.0);
  v.description = {{"kind", "windowed-cosine"}, {"xi", xi}, {"r_in", r_in}, {"r_out", r_out},
                   {"tangent_dim", tangent_dim}};
  return v;
}

BoundaryFunction BoundaryFunction::plateau(double c, double r_in, double r_out, std::size_t tangent_dim) {
  check_window(r_in, r_out);
  BoundaryFunction v;
  v.f = [=](std::span<const double> x, double) { return c * window(norm(x), r_in, r_out); };
  v.tangent_dim = tangent_dim;
  v.radius = r_out;
  v.breakpoints = {-r_out, -r_in, r_in, r_out};
  v.max_panel = std::max(0.25, (r_out - r_in) / 4.0);
  v.description = {{"kind", "plateau"}, {"c", c}, {"r_in", r_in}, {"r_out", r_out}, {"tangent_dim", tangent_dim}};
  return v;
}

BoundaryFunction BoundaryFunction::windowed_gaussian(double width, double r_in, double r_out, std::size_t tangent_dim) {
  check_window(r_in, r_out);
  if (!(width > 0.0)) throw ConfigError("gaussian width must be positive");
  BoundaryFunction v;
  v.f = [=](std::span<const double> x, double) {
    const double r = norm(x);
    return std::exp(-0.5 * r * r / (width * width)) * window(r, r_in, r_out);
  };
  v.tangent_dim = tangent_dim;
  v.radius = r_out;
  v.breakpoints = {-r_out, -r_in, r_in, r_out};
  v.max_panel = std::min(std::max(0.25, (r_out - r_in) / 4.0), width);
  v.description = {{"kind", "windowed-gaussian"}, {"width", width}, {"r_in", r_in}, {"r_out", r_out},
                   {"tangent_dim", tangent_dim}};
  return v;
}

BoundaryFunction BoundaryFunction::power_kink(double l, double r_in, double r_out) {
  check_window(r_in, r_out);
  if (!(l > 0.0)) throw ConfigError("kink exponent must be positive");
  BoundaryFunction v;
  v.f = [=](std::span<const double> x, double) {
    const double r = std::fabs(x[0]);
    return std::pow(r, l) * window(r, r_in, r_out);
  };
  v.radius = r_out;
  v.breakpoints = {-r_out, -r_in, 0.0, r_in, r_out};
  v.singular_points = {0.0};
  v.max_panel = std::max(0.25, (r_out - r_in) / 4.0);
  v.description = {{"kind", "power-kink"}, {"l", l}, {"r_in", r_in}, {"r_out", r_out}};
  return v;
}

BoundaryFunction BoundaryFunction::from_expression(const Expression& e, std::size_t tangent_dim, double radius) {
  BoundaryFunction v;
  v.f = [e](std::span<const double> x, double t) {
    std::vector<double> p(x.begin(), x.end());
    p.push_back(0.0);
    return e.evaluate(p, t);
  };
  v.tangent_dim = tangent_dim;
  v.radius = radius;
  v.max_panel = std::max(0.25, radius / 4.0);
  v.time_dependent = e.depends_on_time();
  v.description = {{"kind", "expression"}, {"expr", e.to_json()}, {"tangent_dim", tangent_dim}, {"radius", radius}};
  return v;
}

BoundaryFunction BoundaryFunction::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::size_t td = j.value("tangent_dim", std::size_t{1});
  if (kind == "windowed-cosine")
    return windowed_cosine(j.at("xi").get<double>(), j.at("r_in").get<double>(), j.at("r_out").get<double>(), td);
  if (kind == "plateau")
    return plateau(j.at("c").get<double>(), j.at("r_in").get<double>(), j.at("r_out").get<double>(), td);
  if (kind == "windowed-gaussian")
    return windowed_gaussian(j.at("width").get<double>(), j.at("r_in").get<double>(), j.at("r_out").get<double>(), td);
  if (kind == "power-kink")
    return power_kink(j.at("l").get<double>(), j.at("r_in").get<double>(), j.at("r_out").get<double>());
  if (kind == "expression")
    return from_expression(Expression::from_json(j.at("expr")), td, j.at("radius").get<double>());
  throw ConfigError("unknown boundary function kind: " + kind);
}

PoissonExtension::PoissonExtension(BoundaryFunction v, std::optional<Expression> cutoff)
    : v_(std::move(v)), cutoff_(std::move(cutoff)) {
  if (v_.tangent_dim < 1 || v_.tangent_dim > 2)
    throw UnsupportedDimensionError("Poisson extension supports one or two tangent dimensions");
  if (!v_.f) throw ConfigError("boundary function is empty");
}

bool PoissonExtension::time_dependent() const {
  return v_.time_dependent || (cutoff_ && cutoff_->depends_on_time());
}

double PoissonExtension::integral_1d(double xp, double xn, double t) const {
  const double R = v_.radius;
  const double L = kInner * xn;
  auto vat = [&](double y) {
    const double p[1] = {y};
    return v_.f(p, t);
  };
  double sum = 0.0;
  if (std::fabs(xp) - L < R) {
    const double th0 = std::atan(kInner);
    std::vector<Cut> cuts{{-th0, false}, {th0, false}};
    for (double b : v_.breakpoints)
      if (std::fabs(b - xp) < L) cuts.push_back({std::atan((b - xp) / xn), is_singular(v_, b)});
    const double max_theta = v_.max_panel / (xn * (1.0 + kInner * kInner));
    sum += integrate_pieces(cuts, [&](double th) { return vat(xp + xn * std::tan(th)); }, max_theta) /
           std::numbers::pi;
  }
  auto kernel = [&](double y) {
    const double s = y - xp;
    return xn / (std::numbers::pi * (s * s + xn * xn)) * vat(y);
  };
  auto side = [&](double lo, double hi, double sign) {
    if (!(hi > lo)) return 0.0;
    std::vector<Cut> cuts{{lo, false}, {hi, false}};
    for (double d = 2.0 * L; d < std::fabs(hi - lo) + L; d *= 2.0) {
      const double y = xp + sign * d;
      if (y > lo && y < hi) cuts.push_back({y, false});
    }
    for (double b : v_.breakpoints)
      if (b > lo && b < hi) cuts.push_back({b, is_singular(v_, b)});
    return integrate_pieces(cuts, kernel, v_.max_panel);
  };
  sum += side(xp + L, R, 1.0);
  sum += side(-R, xp - L, -1.0);
  return sum;
}

double PoissonExtension::integral_2d(std::span<const double> xp, double xn, double t) const {
  const double L = kInner * xn;
  const double rmax = norm(xp) + v_.radius;
  const double twopi = 2.0 * std::numbers::pi;
  double y[2];
  auto ring = [&](double r, int nphi) {
    double s = 0.0;
    for (int k = 0; k < nphi; ++k) {
      const double phi = twopi * k / nphi;
      y[0] = xp[0] + r * std::cos(phi);
      y[1] = xp[1] + r * std::sin(phi);
      s += v_.f(y, t);
    }
    return s / nphi;  // mean over the circle
  };
  auto nphi_for = [&](double r) { return std::max(64, static_cast<int>(std::ceil(8.0 * twopi * r / v_.max_panel))); };
  double sum = 0.0;
  if (norm(xp) - L < v_.radius) {
    const double th0 = std::atan(kInner);
    const double max_theta = v_.max_panel / (xn * (1.0 + kInner * kInner));
    sum += integrate_pieces({{0.0, false}, {th0, false}},
                            [&](double th) {
                              const double r = xn * std::tan(th);
                              return std::sin(th) * ring(r, nphi_for(r));
                            },
                            max_theta);
  }
  if (rmax > L) {
    std::vector<Cut> cuts{{L, false}, {rmax, false}};
    for (double d = 2.0 * L; d < rmax; d *= 2.0) cuts.push_back({d, false});
    sum += integrate_pieces(cuts,
                            [&](double r) {
                              const double q = r * r + xn * xn;
                              return xn * r / (q * std::sqrt(q)) * ring(r, nphi_for(r));
                            },
                            v_.max_panel);
  }
  return sum;
}

double PoissonExtension::harmonic(std::span<const double> x, double t) const {
  if (x.size() != v_.tangent_dim + 1) throw DomainError("point dimension does not match the boundary datum");
  const double xn = x.back();
  if (xn < 0.0) throw DomainError("point outside the half-space");
  if (xn == 0.0) return v_.f(x.first(v_.tangent_dim), t);
  if (v_.tangent_dim == 1) return integral_1d(x[0], xn, t);
  return integral_2d(x.first(2), xn, t);
}

double PoissonExtension::value(std::span<const double> x, double t) const {
  const double u = harmonic(x, t);
  return cutoff_ ? u * cutoff_->evaluate(x, t) : u;
}

std::shared_ptr<const PoissonExtension> poisson_extend(BoundaryFunction v, const SpaceParams& p,
                                                       const std::optional<CutoffSpec>& cutoff) {
  std::optional<Expression> eta;
  if (cutoff) {
    if (cutoff->r_inner <= v.radius)
      throw PreconditionError("cutoff must equal 1 on the support cylinder of the boundary datum");
    eta = make_cutoff(*cutoff, p);
  }
  return std::make_shared<const PoissonExtension>(std::move(v), std::move(eta));
}

}  // namespace wholder
