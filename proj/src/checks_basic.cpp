#include <cmath>
#include <functional>

#include "checks_common.hpp"
#include "wholder/error.hpp"

namespace wholder::detail {

namespace {

using Estimator = std::function<double(const Field&, const Window&)>;

struct PairLadder {
  std::vector<double> scales, a, b, ratio;
};

/// a / b along the case ladder for one member.
PairLadder run_pair(const CheckCase& c, const Member& m, const Estimator& fa, const Estimator& fb) {
  const Window base = window_for(c.window, member_dim(m, c.window));
  ExpressionField f(m.u);
  PairLadder out;
  for (double s : c.ladder.scales) {
    const Window w = c.ladder.rung(base, s);
    out.scales.push_back(s);
    out.a.push_back(fa(f, w));
    out.b.push_back(fb(f, w));
    out.ratio.push_back(safe_ratio(out.a.back(), out.b.back()));
  }
  return out;
}

bool vacuous(const PairLadder& p, const GrowthOptions& g) {
  for (std::size_t i = 0; i < p.a.size(); ++i)
    if (!is_zero(p.a[i], g) || !is_zero(p.b[i], g)) return false;
  return true;
}

double max_of(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::isnan(x) ? x : std::max(m, x);
  return m;
}

double min_of(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::isnan(x) ? x : std::min(m, x);
  return m;
}

nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(json_number(x));
  return j;
}

/// Records a ratio ladder, its trails and the bounded-slope assertions; lo/hi bound the ratio when set.
void record_pair(Recorder& rec, const Member& m, const PairLadder& p, const std::string& a_name,
                 const std::string& b_name, std::optional<std::pair<double, double>> range) {
  auto& rep = rec.report();
  nlohmann::json mj = {{"name", m.name}, {"scales", numbers(p.scales)}, {a_name, numbers(p.a)},
                       {b_name, numbers(p.b)}, {"ratio", numbers(p.ratio)}};
  if (vacuous(p, rec.growth())) {
    mj["vacuous"] = true;
    rep.members.push_back(mj);
    rec.note(m.name + ": both sides vanish, vacuous");
    return;
  }
  rec.trail(m.name + ": " + a_name, p.scales, p.a);
  rec.trail(m.name + ": " + b_name, p.scales, p.b);
  auto cls = rec.trail(m.name + ": ratio", p.scales, p.ratio);
  for (double r : p.ratio) rec.ratio(r);
  rec.check(m.name + ": max ratio", max_of(p.ratio), "<", std::numeric_limits<double>::infinity());
  if (range) {
    rec.check(m.name + ": min ratio", min_of(p.ratio), ">=", range->first);
    rec.check(m.name + ": max ratio in range", max_of(p.ratio), "<=", range->second);
  }
  if (cls) rec.check(m.name + ": ratio slope", cls->slope, "<", rec.growth().slope_threshold);
  rep.members.push_back(mj);
}

SeminormSpec iso(double exponent, double wp, WeightConvention conv = WeightConvention::Max, int order = 1) {
  SeminormSpec s;
  s.kind = PairKind::Isotropic;
  s.exponent = exponent;
  s.weight_power = wp;
  s.convention = conv;
  s.order = order;
  return s;
}

}  // namespace

VerificationReport check_embedding(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const double g = c.params.gamma(), wg = c.params.omega() * g;
  for (const auto& m : c.family) {
    auto p = run_pair(
        c, m, [&](const Field& f, const Window& w) { return weighted_seminorm(f, iso(g - wg, 0.0), w).value; },
        [&](const Field& f, const Window& w) { return weighted_seminorm(f, iso(g, wg), w).value; });
    record_pair(rec, m, p, "unweighted", "weighted", std::nullopt);
  }
  rep.finalize();
  return rep;
}

VerificationReport check_minmax_weight(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const double g = c.params.gamma(), wg = c.params.omega() * g;
  for (const auto& m : c.family) {
    auto p = run_pair(
        c, m,
        [&](const Field& f, const Window& w) { return weighted_seminorm(f, iso(g, wg, WeightConvention::Max), w).value; },
        [&](const Field& f, const Window& w) { return weighted_seminorm(f, iso(g, wg, WeightConvention::Min), w).value; });
    record_pair(rec, m, p, "max weight", "min weight", std::make_pair(1.0 - 1e-12, 1e2));
  }
  rep.finalize();
  return rep;
}

VerificationReport check_cc_metric(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const double g = c.params.gamma(), om = c.params.omega();
  for (const auto& m : c.family) {
    auto p = run_pair(
        c, m, [&](const Field& f, const Window& w) { return weighted_seminorm(f, iso(g, om * g), w).value; },
        [&](const Field& f, const Window& w) { return cc_seminorm(f, g, om, w).value; });
    record_pair(rec, m, p, "weighted", "cc", std::make_pair(1e-2, 1e2));
  }
  rep.finalize();
  return rep;
}

VerificationReport check_kdiff_equivalence(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const double g = c.params.gamma(), wg = c.params.omega() * g;
  const int k = c.options.value("k", 2);
  const double lo = c.options.value("lower", 1e-2), hi = c.options.value("upper", 1e2);
  const double stable = c.options.value("refinement_change", 0.1);
  if (k < 1) throw ConfigError("difference order must be at least 1");
  for (const auto& m : c.family) {
    const Window base = window_for(c.window, member_dim(m, c.window));
    ExpressionField f(m.u);
    std::vector<double> a, b, r;
    for (const Window& w : {base, base.refined()}) {
      a.push_back(weighted_seminorm(f, iso(g, wg), w).value);
      b.push_back(kth_difference_seminorm(f, iso(g, wg, WeightConvention::Max, k), w).value);
      r.push_back(safe_ratio(a.back(), b.back()));
    }
    nlohmann::json mj = {{"name", m.name}, {"first", numbers(a)}, {"kth", numbers(b)}, {"ratio", numbers(r)},
                         {"grids", {"base", "refined"}}};
    if (is_zero(a[0], c.growth) && is_zero(b[0], c.growth) && is_zero(a[1], c.growth) && is_zero(b[1], c.growth)) {
      mj["vacuous"] = true;
      rec.note(m.name + ": both sides vanish, vacuous");
      rep.members.push_back(mj);
      continue;
    }
    for (double x : r) rec.ratio(x);
    rec.trail(m.name + ": ratio", {1.0, 2.0}, r);
    rec.check(m.name + ": ratio", r[0], ">=", lo);
    rec.check(m.name + ": ratio", r[0], "<=", hi);
    rec.check(m.name + ": refined ratio", r[1], ">=", lo);
    rec.check(m.name + ": refined ratio", r[1], "<=", hi);
    rec.check(m.name + ": change under refinement", rel_change(r[1], r[0]), "<", stable);
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

VerificationReport check_eps_restriction(const CheckCase& c) {
  auto rep = start_report(c);
  Recorder rec(rep, c.growth);
  const double g = c.params.gamma(), wg = c.params.omega() * g;
  const auto eps = c.options.value("eps", std::vector<double>{0.5, 0.25, 0.125});
  if (eps.empty()) throw ConfigError("empty eps grid");
  for (double e : eps)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("eps must lie in (0, 1]");
  for (const auto& m : c.family) {
    const Window w = window_for(c.window, member_dim(m, c.window));
    ExpressionField f(m.u);
    const double full = weighted_seminorm(f, iso(g, wg), w).value;
    std::vector<double> restricted, constant, one_dim, inv;
    for (double e : eps) {
      restricted.push_back(eps_restricted_seminorm(f, g, wg, e, EpsRestriction::Below, w).value);
      constant.push_back(safe_ratio(full * std::pow(e, 1.0 + g), restricted.back()));
      one_dim.push_back(safe_ratio(full * e, restricted.back()));
      inv.push_back(1.0 / e);
    }
    nlohmann::json mj = {{"name", m.name}, {"eps", numbers(eps)}, {"full", json_number(full)},
                         {"restricted", numbers(restricted)}, {"constant", numbers(constant)},
                         {"one_dimensional_constant", numbers(one_dim)}};
    bool zero = is_zero(full, c.growth);
    for (double r : restricted) zero = zero && is_zero(r, c.growth);
    if (zero) {
      mj["vacuous"] = true;
      rec.note(m.name + ": both sides vanish, vacuous");
      rep.members.push_back(mj);
      continue;
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
      rec.ratio(constant[i]);
      rec.check(m.name + ": constant at eps " + std::to_string(eps[i]), constant[i], "<",
                std::numeric_limits<double>::infinity());
    }
    auto cls = rec.trail(m.name + ": constant vs 1/eps", inv, constant);
    if (cls) rec.check(m.name + ": constant slope in 1/eps", cls->slope, "<", c.growth.slope_threshold);
    if (eps.size() >= 2) rep.observations[m.name + ": one-dimensional scaling slope"] = json_number(fit_slope(inv, one_dim));
    rep.members.push_back(mj);
  }
  rep.finalize();
  return rep;
}

}  // namespace wholder::detail
