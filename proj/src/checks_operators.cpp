#include <algorithm>
#include <cmath>

#include "checks_common.hpp"
#include "wholder/error.hpp"
#include "wholder/operators.hpp"

namespace wholder::detail {

namespace {

nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(json_number(x));
  return j;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::isnan(x) ? x : std::max(m, std::fabs(x));
  return m;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Central m-th difference quotient along x_N with step h.
double normal_derivative(const Field& f, std::vector<double> x, int m, double h) {
  const double xn = x.back();
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    x.back() = xn + (0.5 * m - i) * h;
    s += ((i % 2) ? -1.0 : 1.0) * binomial(m, i) * f.value(x, 0.0);
  }
  return s / std::pow(h, m);
}

/// sup |v| + sup_h sup_x |Delta_h^{K+1} v(x)| / h^l along each tangent axis, K = floor(l).
double boundary_norm(const BoundaryFunction& v, double l, int points, const std::vector<double>& steps) {
  const int order = static_cast<int>(std::floor(l)) + 1;
  const double r = v.radius + 1.0;
  const std::size_t td = v.tangent_dim;
  const int per_axis = td == 1 ? points : std::max(21, static_cast<int>(std::sqrt(static_cast<double>(points)) * 4));
  std::vector<double> grid(per_axis);
  for (int i = 0; i < per_axis; ++i) grid[i] = -r + 2.0 * r * i / (per_axis - 1);
  double sup = 0.0, semi = 0.0;
  std::vector<double> x(td), y(td);
  std::vector<std::size_t> idx(td, 0);
  while (true) {
    for (std::size_t a = 0; a < td; ++a) x[a] = grid[idx[a]];
    sup = std::max(sup, std::fabs(v(x, 0.0)));
    for (std::size_t a = 0; a < td; ++a)
      for (double h : steps) {
        double d = 0.0;
        y = x;
        for (int i = 0; i <= order; ++i) {
          y[a] = x[a] + i * h;
          d += (((order - i) % 2) ? -1.0 : 1.0) * binomial(order, i) * v(y, 0.0);
        }
        semi = std::max(semi, std::fabs(d) / std::pow(h, l));
      }
    std::size_t a = 0;
    while (a < td && ++idx[a] == grid.size()) idx[a++] = 0;
    if (a == td) break;
  }
  return sup + semi;
}

struct ProbeRatio {
  double holder = 0.0, sup = 0.0, lip = 0.0, ratio = 0.0;
};

/// Discrete check of <g>^gamma <= C |g|^{1-gamma} <g>^{(1)} on sorted samples.
ProbeRatio interpolation_probe(const std::vector<double>& x, const std::vector<double>& g, double gamma) {
  ProbeRatio r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.sup = std::max(r.sup, std::fabs(g[i]));
    if (i + 1 < x.size()) r.lip = std::max(r.lip, std::fabs(g[i + 1] - g[i]) / (x[i + 1] - x[i]));
    for (std::size_t j = i + 1; j < x.size(); ++j)
      r.holder = std::max(r.holder, std::fabs(g[j] - g[i]) / std::pow(x[j] - x[i], gamma));
  }
  r.ratio = safe_ratio(r.holder, std::pow(r.sup, 1.0 - gamma) * std::pow(r.lip, gamma));
  return r;
}

BoundaryFunction boundary_of(const Member& m, std::size_t tangent_dim, double radius) {
  if (!m.boundary.is_null()) return BoundaryFunction::from_json(m.boundary);
  return BoundaryFunction::from_expression(m.u, tangent_dim, radius);
}

std::vector<std::vector<double>> probe_points(const BoundaryFunction& v, int count) {
  std::vector<std::vector<double>> pts;
  const double r = std::min(v.radius, 3.0);
  for (int i = 0; i < count; ++i) {
    const double s = -r + 2.0 * r * (i + 0.5) / count;
    if (v.tangent_dim == 1) pts.push_back({s});
    else pts.push_back({s, 0.3 * s});
  }
  return pts;
}

SeminormSpec directional(std::size_t axis, double exponent, double wp, double pre) {
  SeminormSpec s;
  s.kind = PairKind::Directional;
  s.axis = static_cast<int>(axis);
  s.exponent = exponent;
  s.weight_power = wp;
  s.pre_weight = pre;
  return s;
}

SeminormSpec isotropic(double exponent, double wp, double pre) {
  SeminormSpec s;
  s.exponent = exponent;
  s.weight_power = wp;
  s.pre_weight = pre;
  return s;
}

}  // namespace

VerificationReport check_trace_extension(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const auto& p = c.params;
  const int m = p.m();
  const double l = p.m_minus_n() + (1.0 - p.omega()) * p.gamma();
  const double repro_tol = c.options.value("reproduction_tolerance", 1e-4);
  const double decay_tol = c.options.value("decay_tolerance", 1e-3);
  const double slope_tol = c.options.value("decay_slope_tolerance", 0.1);
  const auto heights = c.options.value("decay_heights", std::vector<double>{0.1, 0.2, 0.4});
  const int lo_level = c.options.value("decay_first_level", m <= 2 ? 4 : 3);
  const int hi_level = c.options.value("decay_last_level", m <= 2 ? 16 : 8);
  const bool norm_ratio = c.options.value("norm_ratio", true);
  std::vector<double> steps;
  for (int k = 1; k <= c.options.value("boundary_norm_steps", 12); ++k) steps.push_back(std::ldexp(1.0, -k));
  rep.observations["boundary smoothness"] = l;

  for (const auto& mem : c.family) {
    const Window base = window_for(c.window, member_dim(mem, c.window));
    const std::size_t dim = base.dim();
    const BoundaryFunction v = boundary_of(mem, dim - 1, c.options.value("expression_radius", 1.0));
    if (v.tangent_dim != dim - 1) throw ConfigError("boundary datum of '" + mem.name + "' does not match the window");
    CutoffSpec eta;
    eta.center.assign(dim, 0.0);
    eta.r_inner = v.radius + 0.5;
    eta.r_outer = v.radius + 1.5;
    eta.order = m + 2;
    const auto ev = poisson_extend(v, p, eta);
    const std::string kind = v.description.value("kind", std::string());
    nlohmann::json mj = {{"name", mem.name}, {"boundary", v.description}};

    // boundary reproduction
    const auto pts = probe_points(v, c.options.value("trace_points", 9));
    const auto tr = trace(std::static_pointer_cast<const Field>(ev), 0, pts, 0.0, p);
    std::vector<double> vin, diff;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      vin.push_back(v(pts[i], 0.0));
      diff.push_back(tr[i] - vin.back());
    }
    const double scale = max_abs(vin);
    const double repro = scale > 0.0 ? max_abs(diff) / scale : max_abs(diff);
    mj["trace"] = numbers(tr);
    rec.check(mem.name + ": boundary reproduction", repro, "<", repro_tol);

    // Fourier eigenfunction decay
    if (kind == "windowed-cosine" && v.tangent_dim == 1) {
      const double xi = v.description.at("xi").get<double>();
      std::vector<double> errs;
      for (double h : heights) {
        const std::vector<double> x{0.0, h};
        const double exact = std::exp(-std::fabs(xi) * h);
        errs.push_back(std::fabs(ev->value(x, 0.0) - exact) / exact);
      }
      mj["decay_errors"] = numbers(errs);
      rec.check(mem.name + ": exponential decay match", max_abs(errs), "<", decay_tol);
    }

    // growth of D_{x_N}^m near the boundary
    {
      std::vector<double> hs, ds;
      std::vector<double> x(dim, 0.0);
      for (int k = lo_level; k <= hi_level; ++k) {
        x.back() = std::ldexp(1.0, -k);
        hs.push_back(x.back());
        ds.push_back(std::fabs(normal_derivative(*ev, x, m, 0.1 * x.back())));
      }
      mj["decay_heights"] = numbers(hs);
      mj["decay_values"] = numbers(ds);
      if (max_abs(ds) < c.growth.atol) {
        rec.note(mem.name + ": top normal derivative vanishes");
      } else {
        std::vector<double> inv;
        for (double h : hs) inv.push_back(1.0 / h);
        const double slope = -fit_slope(inv, ds);
        mj["decay_slope"] = json_number(slope);
        rec.trail(mem.name + ": |D_N^m Ev| vs 1/x_N", inv, ds);
        if (kind == "power-kink" && std::fabs(v.description.at("l").get<double>() - l) < 1e-12)
          rec.check(mem.name + ": decay exponent deviation", std::fabs(slope - (l - m)), "<=", slope_tol);
        else
          rec.check(mem.name + ": decay exponent", slope, ">=", l - m - slope_tol);
      }
    }

    // extension bound along the ladder
    if (norm_ratio) {
      const double bn = boundary_norm(v, l, c.options.value("boundary_norm_points", 801), steps);
      EvaluatorSource src(ev, c.options.value("fd_step", 1e-3));
      std::vector<double> norms, ratios;
      for (double s : c.ladder.scales) {
        norms.push_back(composite_norm(src, p, NormVariant::Tilde, false, c.ladder.rung(base, s)).total);
        ratios.push_back(safe_ratio(norms.back(), bn));
      }
      mj["boundary_norm"] = json_number(bn);
      mj["extension_norm"] = numbers(norms);
      if (is_zero(bn, c.growth) && is_zero(max_abs(norms), c.growth)) {
        rec.note(mem.name + ": zero datum, zero extension");
        rec.check(mem.name + ": extension of zero", max_abs(norms), "<", c.growth.atol);
      } else {
        for (double r : ratios) rec.ratio(r);
        auto cls = rec.trail(mem.name + ": extension ratio", c.ladder.scales, ratios);
        rec.check(mem.name + ": extension ratio", max_abs(ratios), "<", std::numeric_limits<double>::infinity());
        if (cls) rec.check(mem.name + ": extension ratio slope", cls->slope, "<", c.growth.slope_threshold);
      }
    }

    // interpolation between sup and Lipschitz seminorms on probes
    {
      const double g = p.gamma();
      const double bound = std::pow(2.0, 1.0 - g) * (1.0 + 1e-9);
      std::vector<double> xs, fs, ys, gs;
      std::vector<double> x(dim, 0.0);
      for (int i = 0; i <= 120; ++i) {
        x.assign(dim, 0.0);
        x.back() = 0.05 + 0.95 * i / 120.0;
        xs.push_back(x.back());
        fs.push_back(normal_derivative(*ev, x, m, 0.05 * x.back()));
        x.back() = 0.1;
        x[0] = -1.5 + 3.0 * i / 120.0;
        ys.push_back(x[0]);
        gs.push_back(ev->value(x, 0.0));
      }
      for (const auto& [label, r] : {std::pair{std::string("normal probe"), interpolation_probe(xs, fs, g)},
                                     std::pair{std::string("tangent probe"), interpolation_probe(ys, gs, g)}}) {
        mj[label] = {{"holder", json_number(r.holder)}, {"sup", json_number(r.sup)}, {"lipschitz", json_number(r.lip)}};
        if (r.holder == 0.0) continue;
        rec.check(mem.name + ": " + label + " interpolation constant", r.ratio, "<=", bound);
      }
    }
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

VerificationReport check_interpolation(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const auto& p = c.params;
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), wg = p.omega() * g;
  std::vector<double> eps;
  for (int k = c.options.value("eps_min_exp", -6); k <= c.options.value("eps_max_exp", 6); ++k)
    eps.push_back(std::ldexp(1.0, k));
  if (c.options.contains("eps")) eps = c.options.at("eps").get<std::vector<double>>();
  std::vector<double> hs;
  for (int k = -8; k <= 8; ++k) hs.push_back(std::ldexp(1.0, k));
  if (c.options.contains("h")) hs = c.options.at("h").get<std::vector<double>>();
  if (eps.size() < 2 || hs.size() < 3) throw ConfigError("interpolation check needs at least 2 eps and 3 h values");
  const double exp_tol = c.options.value("exponent_tolerance", 0.1);
  const double support = c.options.value("support_radius", 1.0);

  for (const auto& mem : c.family) {
    const Window base = window_for(c.window, member_dim(mem, c.window));
    const std::size_t dim = base.dim(), N = dim - 1;
    const auto axes = c.options.value("axes", std::vector<std::size_t>{0, N});
    nlohmann::json mj = {{"name", mem.name}};

    for (std::size_t k : axes) {
      if (k > N) throw ConfigError("interpolation axis out of range");
      MultiIndex alpha(dim);
      if (c.options.contains("alpha")) {
        alpha.a = c.options.at("alpha").get<std::vector<int>>();
        if (alpha.a.size() != dim || alpha.order() != m) throw ConfigError("alpha must have order m in the window dimension");
      } else {
        alpha[k] = m - 1;
        alpha[k == 0 ? N : 0] += 1;
      }
      const int ak = alpha[k];
      auto terms = [&](const Expression& u, const Window& w) {
        ExpressionSource src(u);
        const double L = estimate(src, alpha, 0, directional(k, g, wg, n), w).value;
        double A = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
          if (i != k) A += estimate(src, MultiIndex::unit(dim, i, m), 0, directional(i, g, wg, n), w).value;
        const double B = estimate(src, MultiIndex::unit(dim, k, m), 0, directional(k, g, wg, n), w).value;
        return std::array<double, 3>{L, A, B};
      };
      const std::string tag = mem.name + ", axis " + std::to_string(k);
      const double ea = -ak - g, eb = m - ak;
      const auto t0 = terms(mem.u, base);
      if (is_zero(t0[0], c.growth)) {
        rec.note(tag + ": left side vanishes, vacuous");
        continue;
      }
      // one constant over the whole eps grid
      std::vector<double> cs;
      for (double e : eps) cs.push_back(safe_ratio(t0[0], std::pow(e, ea) * t0[1] + std::pow(e, eb) * t0[2]));
      const double C = *std::max_element(cs.begin(), cs.end());
      rec.ratio(C);
      rec.check(tag + ": single constant", C, "<", std::numeric_limits<double>::infinity());
      // eps exponents from the axis rescaling
      std::vector<double> ra, rb;
      for (double e : eps) {
        Window w = base;
        if (k < N) w.tangent_half_width[k] /= e;
        else w.boundary_extent /= e;
        const auto t = terms(rescale_axis(mem.u, k, dim, e), w);
        ra.push_back(safe_ratio(t[1], t[0]));
        rb.push_back(safe_ratio(t[2], t[0]));
      }
      const double sa = fit_slope(eps, ra), sb = fit_slope(eps, rb);
      mj["axis " + std::to_string(k)] = {{"alpha", alpha.a},     {"eps", numbers(eps)},      {"constants", numbers(cs)},
                                         {"A_over_L", numbers(ra)}, {"B_over_L", numbers(rb)}, {"A_exponent", json_number(sa)},
                                         {"B_exponent", json_number(sb)}};
      rec.trail(tag + ": constant vs eps", eps, cs);
      if (k < N) {
        if (!is_zero(t0[1], c.growth))
          rec.check(tag + ": tangential term exponent deviation", std::fabs(sa - ea), "<=", exp_tol);
        if (!is_zero(t0[2], c.growth))
          rec.check(tag + ": own-axis term exponent deviation", std::fabs(sb - eb), "<=", exp_tol);
      } else {
        rep.observations[tag + ": tangential term exponent"] = json_number(sa);
        rep.observations[tag + ": own-axis term exponent"] = json_number(sb);
        rep.observations[tag + ": stated tangential exponent"] = -ak - (1.0 - p.omega()) * g;
        rec.note(tag + ": normal-axis exponents are recorded, not judged");
      }
    }

    // sup bound with an h sweep, 0 <= j < n
    ExpressionSource src(mem.u);
    for (int j = 0; j < n; ++j) {
      const bool thick = n - j >= 1.0;
      double S = 0.0, semi = 0.0, lower = 0.0;
      for (const auto& a : multi_indices(dim, m - j)) {
        S += sup_norm(*src.derivative(a, 0, n - j), base).value;
        semi += estimate(src, a, 0, isotropic(g, wg, thick ? n - j : n), base).value;
      }
      for (const auto& a : multi_indices(dim, m - j - 1))
        lower += sup_norm(*src.derivative(a, 0, thick ? n - j - 1 : 0.0), base).value;
      const double factor = thick ? 1.0 + support : 1.0 + std::pow(support, n - j);
      std::vector<double> bounds;
      for (double h : hs) bounds.push_back(std::pow(h, (1.0 - p.omega()) * g) * semi + factor / h * lower);
      const std::string tag = mem.name + ", sup bound j=" + std::to_string(j);
      mj["sup bound j=" + std::to_string(j)] = {{"sup", json_number(S)}, {"h", numbers(hs)}, {"bounds", numbers(bounds)}};
      if (is_zero(S, c.growth)) {
        rec.note(tag + ": left side vanishes");
        continue;
      }
      const double best = *std::min_element(bounds.begin(), bounds.end());
      rec.check(tag + ": minimum below the small-h endpoint", best, "<", bounds.front());
      rec.check(tag + ": minimum below the large-h endpoint", best, "<", bounds.back());
      const double C = safe_ratio(S, best);
      rec.ratio(C);
      rec.check(tag + ": constant", C, "<", std::numeric_limits<double>::infinity());
    }
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

}  // namespace wholder::detail
