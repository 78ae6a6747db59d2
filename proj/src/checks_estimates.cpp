#include <cmath>
#include <map>

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

std::vector<double> values(const std::vector<TrailPoint>& t) {
  std::vector<double> v;
  for (const auto& p : t) v.push_back(p.value);
  return v;
}

std::vector<double> trail_scales(const std::vector<TrailPoint>& t) {
  std::vector<double> v;
  for (const auto& p : t) v.push_back(p.scale);
  return v;
}

void require_rungs(const Ladder& l) {
  if (l.scales.size() < 3) throw TooFewRungsError("this check needs a ladder with at least 3 rungs");
}

/// Per-rung sums of the terms of each group.
std::map<std::string, std::vector<double>> group_sums(const std::vector<TermResult>& terms) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& t : terms) {
    auto& v = out[t.recipe.group];
    v.resize(t.estimate.trail.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += t.estimate.trail[i].value;
  }
  return out;
}

void record_terms(Recorder& rec, const Member& m, const std::vector<TermResult>& terms) {
  for (const auto& t : terms)
    rec.trail(m.name + ": " + t.recipe.group + " " + t.recipe.label, t.estimate.trail, t.estimate.classification);
}

nlohmann::json groups_json(const std::map<std::string, Classification>& g) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, c] : g) j[k] = c.to_json();
  return j;
}

/// Judges each finite group against the right-hand side trail; diverging groups are set aside.
void judge_groups(Recorder& rec, const Member& m, const std::map<std::string, Classification>& cls,
                  const std::map<std::string, std::vector<double>>& sums, const std::vector<double>& rhs,
                  nlohmann::json& mj, double stability) {
  const auto& g = rec.growth();
  nlohmann::json excluded = nlohmann::json::array();
  nlohmann::json ratios = nlohmann::json::object();
  for (const auto& [name, c] : cls) {
    if (c.kind == Growth::Diverging) {
      excluded.push_back(name);
      rec.note(m.name + ": group " + name + " diverges along the ladder; excluded as an infinite left-hand term");
      continue;
    }
    if (c.kind == Growth::Zero) continue;
    rec.check(m.name + ": " + name + " slope", c.slope, "<", g.slope_threshold);
    const auto& s = sums.at(name);
    std::vector<double> r;
    for (std::size_t i = 0; i < s.size(); ++i) r.push_back(safe_ratio(s[i], rhs[i]));
    for (double x : r) rec.ratio(x);
    ratios[name] = numbers(r);
    rec.check(m.name + ": " + name + " ratio", r.back(), "<", std::numeric_limits<double>::infinity());
    if (r.size() >= 2)
      rec.check(m.name + ": " + name + " ratio change over the finest rungs", rel_change(r.back(), r[r.size() - 2]),
                "<=", stability);
  }
  mj["excluded_groups"] = excluded;
  mj["ratios"] = ratios;
}

std::vector<double> rhs_trail(const FieldSource& src, const SpaceParams& p, const Window& base, const Ladder& l) {
  std::vector<double> out;
  for (double s : l.scales) out.push_back(main_estimate_rhs(src, p, l.rung(base, s)).value);
  return out;
}

/// Largest |x_N^{n-j} D^alpha u| at x_N = height over the tangential samples, for alpha_N < m - j, j < n.
double vanishing_residual(const Expression& u, const SpaceParams& p, const Window& w, double height, double t) {
  const std::size_t dim = w.dim();
  const ExpressionSource src(u);
  double worst = 0.0;
  std::vector<std::vector<double>> tang(dim - 1);
  for (std::size_t a = 0; a + 1 < dim; ++a) tang[a] = w.tangent_samples(a);
  for (int j = 0; j < p.n(); ++j)
    for (const auto& alpha : multi_indices(dim, p.m() - j)) {
      if (alpha.normal() >= p.m() - j) continue;
      const Expression f = src.derivative_expression(alpha, 0, p.n() - j);
      std::vector<std::size_t> idx(dim - 1, 0);
      std::vector<double> x(dim, height);
      while (true) {
        for (std::size_t a = 0; a + 1 < dim; ++a) x[a] = tang[a][idx[a]];
        worst = std::max(worst, std::fabs(f.evaluate(x, t)));
        std::size_t a = 0;
        while (a + 1 < dim && ++idx[a] == tang[a].size()) idx[a++] = 0;
        if (a + 1 >= dim) break;
      }
    }
  return worst;
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

VerificationReport check_main_estimate(const CheckCase& c) {
  require_rungs(c.ladder);
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const auto& p = c.params;
  const double stability = c.options.value("ratio_stability", 0.2);
  const double height = c.options.value("vanishing_height", 1e-12);
  const double vanish_tol = c.options.value("vanishing_tolerance", 1e-4);
  for (const auto& m : c.family) {
    const Window base = window_for(c.window, member_dim(m, c.window));
    ExpressionSource src(m.u);
    auto lhs = main_estimate_lhs(src, p, base, c.ladder, c.growth);
    auto rhs = rhs_trail(src, p, base, c.ladder);
    record_terms(rec, m, lhs.terms);
    rec.trail(m.name + ": RHS", c.ladder.scales, rhs);
    nlohmann::json mj = {{"name", m.name}, {"groups", groups_json(lhs.groups)}, {"rhs", numbers(rhs)}};
    judge_groups(rec, m, lhs.groups, group_sums(lhs.terms), rhs, mj, stability);
    const double res = vanishing_residual(m.u, p, base, height, 0.0);
    mj["vanishing_residual"] = json_number(res);
    rec.check(m.name + ": weighted lower derivatives vanish on the boundary", res, "<=", vanish_tol);
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

VerificationReport check_counterexample(const CheckCase& c) {
  const auto& p = c.params;
  if (p.m() != 2 || !(p.n() >= 0.0 && p.n() < 1.0))
    throw PreconditionError("the counterexample needs m = 2 and n in [0, 1)");
  require_rungs(c.ladder);
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const double expected = 2.0 - p.gamma() + p.omega() * p.gamma();
  const double tol = c.options.value("slope_tolerance", 0.15);
  for (const auto& m : c.family) {
    const Window base = window_for(c.window, member_dim(m, c.window));
    const std::size_t dim = base.dim();
    ExpressionSource src(m.u);
    auto lhs = main_estimate_lhs(src, p, base, c.ladder, c.growth);
    record_terms(rec, m, lhs.terms);
    const auto rhs_terms = main_estimate_rhs_terms(p, src.time_dependent(), dim);
    nlohmann::json rhs_max = nlohmann::json::object();
    for (const auto& r : rhs_terms) {
      std::vector<double> v;
      for (double s : c.ladder.scales) v.push_back(evaluate_term(src, r, c.ladder.rung(base, s)).value);
      rec.trail(m.name + ": RHS " + r.label, c.ladder.scales, v);
      double worst = 0.0;
      for (double x : v) worst = std::isnan(x) ? x : std::max(worst, std::fabs(x));
      rhs_max[r.label] = json_number(worst);
      rec.check(m.name + ": RHS " + r.label, worst, "<", c.growth.atol);
    }
    MultiIndex mixed(dim);
    mixed[0] = 1;
    mixed[dim - 1] = 1;
    const TermResult* hit = nullptr;
    for (const auto& t : lhs.terms)
      if (t.recipe.group == "G1" && t.recipe.alpha == mixed && t.recipe.spec.kind == PairKind::Isotropic &&
          t.recipe.time_order == 0)
        hit = &t;
    if (!hit) throw ConfigError("counterexample needs a mixed second derivative term");
    const double slope = hit->estimate.classification->slope;
    rec.check(m.name + ": mixed term slope", slope, ">", c.growth.slope_threshold);
    rec.check(m.name + ": mixed term slope deviation", std::fabs(slope - expected), "<=", tol);
    rep.observations[m.name + ": expected mixed slope"] = expected;
    rep.members.push_back({{"name", m.name},
                           {"groups", groups_json(lhs.groups)},
                           {"rhs_max", rhs_max},
                           {"mixed_trail", numbers(values(hit->estimate.trail))},
                           {"mixed_slope", json_number(slope)}});
    rec.note(m.name + ": right-hand side vanishes while a mixed weighted seminorm diverges; the estimate only covers finite left-hand terms");
  }
  rep.finalize();
  return rep;
}

VerificationReport check_lower_order(const CheckCase& c) {
  require_rungs(c.ladder);
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const auto& p = c.params;
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), wg = p.omega() * g;
  const double thr = c.growth.slope_threshold;
  for (const auto& mem : c.family) {
    const Window base = window_for(c.window, member_dim(mem, c.window));
    const std::size_t dim = base.dim(), N = dim - 1;
    ExpressionSource src(mem.u);
    nlohmann::json mj = {{"name", mem.name}};
    auto ladder_of = [&](const std::string& label, const MultiIndex& a, const SeminormSpec& spec) {
      auto e = run_ladder([&](const Window& w) { return estimate(src, a, 0, spec, w); }, base, c.ladder, c.growth);
      rec.trail(mem.name + ": " + label, e.trail, e.classification);
      mj[label] = numbers(values(e.trail));
      return e;
    };
    auto ratio_of = [&](const std::string& label, const SeminormEstimate& num, const SeminormEstimate& den) {
      std::vector<double> r;
      for (std::size_t i = 0; i < num.trail.size(); ++i) r.push_back(safe_ratio(num.trail[i].value, den.trail[i].value));
      bool zero = true;
      for (std::size_t i = 0; i < r.size(); ++i)
        zero = zero && is_zero(num.trail[i].value, c.growth) && is_zero(den.trail[i].value, c.growth);
      if (zero) {
        rec.note(mem.name + ": " + label + " vacuous, both sides vanish");
        return;
      }
      for (double x : r) rec.ratio(x);
      auto cls = rec.trail(mem.name + ": " + label, trail_scales(num.trail), r);
      rec.check(mem.name + ": " + label, r.back(), "<", std::numeric_limits<double>::infinity());
      if (cls) rec.check(mem.name + ": " + label + " slope", cls->slope, "<", thr);
    };

    // sum over 0 <= j < n of the pure normal seminorms against the top one
    const auto top = ladder_of("top", MultiIndex::unit(dim, N, m), directional(N, g, wg, n));
    SeminormEstimate chain = top;
    for (int j = 1; j < n; ++j) {
      const auto e = ladder_of("order " + std::to_string(m - j), MultiIndex::unit(dim, N, m - j),
                               directional(N, g, wg, n - j));
      for (std::size_t i = 0; i < chain.trail.size(); ++i) chain.trail[i].value += e.trail[i].value;
    }
    ratio_of("pure normal sum over top", chain, top);

    if (p.integer_n()) {
      const int k = m - p.n_floor();
      const auto gauge = gauge_tilde(mem.u, p, dim);
      const bool vanishing = std::fabs(gauge.a) < 1e-8;
      mj["boundary_value"] = json_number(gauge.a);
      mj["vanishing"] = vanishing;
      const auto s = ladder_of("normal order " + std::to_string(k), MultiIndex::unit(dim, N, k),
                               directional(N, g, wg, 0.0));
      const double slope = s.classification->slope;
      if (vanishing) rec.check(mem.name + ": vanishing member, normal seminorm slope", slope, "<", thr);
      else rec.check(mem.name + ": non-vanishing member, normal seminorm slope", slope, ">", thr);
      if (dim >= 2 && k >= 1) {
        const auto v = src.derivative(MultiIndex::unit(dim, N, k - 1), 0, 0.0);
        auto z = run_ladder(
            [&](const Window& w) { return zygmund_seminorm(*v, w, ZygmundVariant::Tangential, (1.0 - p.omega()) * g); },
            base, c.ladder, c.growth);
        rec.trail(mem.name + ": zygmund", z.trail, z.classification);
        mj["zygmund"] = numbers(values(z.trail));
        rec.check(mem.name + ": zygmund slope", z.classification->slope, "<", thr);
      }
    } else {
      const int q = int_part(p.m_minus_n());
      const double fn = frac_part(n);
      SeminormSpec lo = directional(N, 1.0 - fn, 0.0, 0.0);
      const auto a1 = ladder_of("holder of order " + std::to_string(q), MultiIndex::unit(dim, N, q), lo);
      const auto a2 = run_ladder(
          [&](const Window& w) { return sup_norm(*src.derivative(MultiIndex::unit(dim, N, q + 1), 0, fn), w); }, base,
          c.ladder, c.growth);
      rec.trail(mem.name + ": weighted sup of order " + std::to_string(q + 1), a2.trail, a2.classification);
      const auto a3 = ladder_of("weighted seminorm of order " + std::to_string(q + 1), MultiIndex::unit(dim, N, q + 1),
                                isotropic(g, wg, fn));
      const auto a4 = ladder_of("top isotropic", MultiIndex::unit(dim, N, m), isotropic(g, wg, n));
      ratio_of("chain 1", a1, a2);
      ratio_of("chain 2", a2, a3);
      ratio_of("chain 3", a3, a4);
    }
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

VerificationReport check_general_domain(const CheckCase& c) {
  require_rungs(c.ladder);
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const auto& p = c.params;
  DiskWindow disk;
  if (c.options.contains("disk")) {
    const auto& d = c.options.at("disk");
    disk.geometry = DomainGeometry::make_disk(d.value("center", std::vector<double>{0.0, 1.5}),
                                              d.value("radius", 1.0));
    disk.levels = d.value("levels", disk.levels);
    disk.angles = d.value("angles", disk.angles);
  }
  const bool vanishing = c.options.value("vanishing", true);
  for (const auto& m : c.family) {
    ExpressionSource src(m.u);
    const bool parabolic = src.time_dependent();
    const std::size_t dim = disk.geometry.disk.center.size();
    const auto lhs_r = domain_lhs_terms(p, parabolic, dim, vanishing);
    const auto rhs_r = norm_terms(p, NormVariant::Domain, parabolic, dim);
    std::vector<TermResult> lhs;
    for (const auto& r : lhs_r) lhs.push_back({r, {}});
    std::vector<double> rhs;
    for (double s : c.ladder.scales) {
      const DiskWindow w = disk.deepened(s);
      const auto cloud = w.cloud();
      for (auto& t : lhs) {
        const auto e = evaluate_term(src, t.recipe, cloud, w.geometry);
        t.estimate.trail.push_back({s, w.levels, e.value});
        t.estimate.value = e.value;
      }
      rhs.push_back(evaluate_terms(src, rhs_r, cloud, w.geometry).total);
    }
    std::map<std::string, Classification> groups;
    for (auto& t : lhs) {
      t.estimate.classification = classify_growth(t.estimate.trail, c.growth);
      const auto& cl = *t.estimate.classification;
      auto it = groups.find(t.recipe.group);
      auto rank = [](Growth g) { return g == Growth::Diverging ? 2 : g == Growth::Bounded ? 1 : 0; };
      if (it == groups.end() || rank(cl.kind) > rank(it->second.kind) ||
          (rank(cl.kind) == rank(it->second.kind) && cl.slope > it->second.slope))
        groups[t.recipe.group] = cl;
    }
    record_terms(rec, m, lhs);
    rec.trail(m.name + ": domain norm", c.ladder.scales, rhs);
    nlohmann::json mj = {{"name", m.name}, {"groups", groups_json(groups)}, {"rhs", numbers(rhs)}};
    judge_groups(rec, m, groups, group_sums(lhs), rhs, mj, c.options.value("ratio_stability", 0.2));
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

VerificationReport check_small_time(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const auto& p = c.params;
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), wg = p.omega() * g;
  const auto tgrid = c.options.value("T", std::vector<double>{1.0, 0.5, 0.25, 0.125});
  const double slack = c.options.value("slope_slack", 0.05);
  if (tgrid.size() < 2) throw ConfigError("small-time check needs at least two horizons");
  for (double T : tgrid)
    if (!(T > 0.0 && T <= 1.0)) throw ConfigError("horizons must lie in (0, 1]");

  struct Term {
    TermRecipe recipe;
    double delta;
  };
  for (const auto& mem : c.family) {
    const Window base = window_for(c.window, member_dim(mem, c.window));
    const std::size_t dim = base.dim();
    // probe u(x, 0) and u_t(x, 0)
    const Expression ut = differentiate(mem.u, MultiIndex(dim), 1);
    for (double xn : {0.0, 0.1, 0.5, 1.0})
      for (double x1 : {-0.7, 0.0, 0.3}) {
        std::vector<double> x(dim, x1);
        x.back() = xn;
        if (std::fabs(mem.u.evaluate(x, 0.0)) > 1e-14 || std::fabs(ut.evaluate(x, 0.0)) > 1e-14)
          throw PreconditionError("member '" + mem.name + "' does not vanish with its time derivative at t = 0");
      }
    std::vector<Term> terms;
    for (int j = 1; j <= n; ++j) {
      const double delta = std::min({g / m, static_cast<double>(j) / m, (1.0 - g) / m});
      for (const auto& a : multi_indices(dim, m - j)) {
        TermRecipe s;
        s.alpha = a;
        s.op = TermRecipe::Op::Sup;
        s.spec.pre_weight = n;
        s.label = "sup x_N^n D" + a.str() + " u";
        terms.push_back({s, delta});
        TermRecipe t = s;
        t.op = TermRecipe::Op::Seminorm;
        t.spec.kind = PairKind::Time;
        t.spec.exponent = g / m;
        t.label = "x_N^n D" + a.str() + " u | t";
        terms.push_back({t, delta});
        TermRecipe x = s;
        x.op = TermRecipe::Op::Seminorm;
        x.spec = isotropic(g, wg, n);
        x.label = "x_N^n D" + a.str() + " u | iso";
        terms.push_back({x, delta});
      }
    }
    const double delta0 = std::min({g / m, 1.0 / m, (1.0 - g) / m});
    for (int k = 0; k < p.m_minus_n(); ++k)
      for (const auto& a : multi_indices(dim, k)) {
        TermRecipe s;
        s.alpha = a;
        s.op = TermRecipe::Op::Sup;
        s.label = "sup D" + a.str() + " u";
        terms.push_back({s, delta0});
        TermRecipe t = s;
        t.op = TermRecipe::Op::Seminorm;
        t.spec.kind = PairKind::Time;
        t.spec.exponent = g / m;
        t.label = "D" + a.str() + " u | t";
        terms.push_back({t, delta0});
        TermRecipe x = s;
        x.op = TermRecipe::Op::Seminorm;
        x.spec = isotropic(g, 0.0, 0.0);
        x.label = "D" + a.str() + " u | iso";
        terms.push_back({x, delta0});
      }
    ExpressionSource src(mem.u);
    nlohmann::json mj = {{"name", mem.name}, {"T", numbers(tgrid)}};
    for (const auto& t : terms) {
      std::vector<double> v;
      bool zero = true;
      for (double T : tgrid) {
        Window w = base;
        w.time_extent = T;
        v.push_back(evaluate_term(src, t.recipe, w).value);
        zero = zero && is_zero(v.back(), c.growth);
      }
      mj[t.recipe.label] = numbers(v);
      if (zero) continue;
      const double slope = fit_slope(tgrid, v);
      std::vector<TrailPoint> tr;
      for (std::size_t i = 0; i < v.size(); ++i) tr.push_back({tgrid[i], base.levels, v[i]});
      rec.trail(mem.name + ": " + t.recipe.label, tr, Classification{Growth::Bounded, slope});
      rec.check(mem.name + ": " + t.recipe.label + " T-slope", slope, ">=", t.delta - slack);
    }
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

}  // namespace wholder::detail
