#include "wholder/norms.hpp"

#include <cmath>
#include <sstream>

#include "wholder/error.hpp"

namespace wholder {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string weighted_name(double p, const MultiIndex& a, int t, const char* dist = "x_N") {
  std::ostringstream os;
  if (p != 0.0) os << dist << "^" << num(p) << " ";
  if (a.order() > 0) os << "D" << a.str() << " ";
  if (t > 0) os << "D_t ";
  os << "u";
  return os.str();
}

TermRecipe sup_term(std::string group, const MultiIndex& a, int t, double pw = 0.0) {
  TermRecipe r;
  r.group = std::move(group);
  r.alpha = a;
  r.time_order = t;
  r.op = TermRecipe::Op::Sup;
  r.spec.pre_weight = pw;
  r.label = "sup " + weighted_name(pw, a, t);
  return r;
}

TermRecipe iso_term(std::string group, const MultiIndex& a, int t, double pw, double exponent, double wp) {
  TermRecipe r;
  r.group = std::move(group);
  r.alpha = a;
  r.time_order = t;
  r.spec.kind = PairKind::Isotropic;
  r.spec.exponent = exponent;
  r.spec.weight_power = wp;
  r.spec.pre_weight = pw;
  r.label = weighted_name(pw, a, t) + " | iso " + num(exponent) + (wp != 0.0 ? " w" + num(wp) : "");
  return r;
}

TermRecipe time_term(std::string group, const MultiIndex& a, int t, double pw, double beta) {
  TermRecipe r;
  r.group = std::move(group);
  r.alpha = a;
  r.time_order = t;
  r.spec.kind = PairKind::Time;
  r.spec.exponent = beta;
  r.spec.pre_weight = pw;
  r.label = weighted_name(pw, a, t) + " | t " + num(beta);
  return r;
}

TermRecipe dir_term(std::string group, const MultiIndex& a, double pw, std::size_t axis, double exponent, double wp) {
  TermRecipe r;
  r.group = std::move(group);
  r.alpha = a;
  r.spec.kind = PairKind::Directional;
  r.spec.axis = static_cast<int>(axis);
  r.spec.exponent = exponent;
  r.spec.weight_power = wp;
  r.spec.pre_weight = pw;
  r.label = weighted_name(pw, a, 0) + " | x" + std::to_string(axis + 1) + " " + num(exponent) +
            (wp != 0.0 ? " w" + num(wp) : "");
  return r;
}

/// Tangential-only seminorm of D_{x'}^{a'} D_{x_N}^j u with exponent e; fractional part 0 switches to k = 2, e = 1.
TermRecipe tangential_term(std::string group, const MultiIndex& a, double exponent, double wp, bool integer_edge) {
  TermRecipe r;
  r.group = std::move(group);
  r.alpha = a;
  r.spec.kind = PairKind::Tangential;
  r.spec.weight_power = wp;
  if (integer_edge) {
    r.spec.order = 2;
    r.spec.exponent = 1.0;
    r.flag = "integer smoothness: second tangential difference with exponent 1";
  } else {
    r.spec.exponent = exponent;
  }
  r.label = weighted_name(0.0, a, 0) + " | x' " + num(r.spec.exponent) + (r.spec.order > 1 ? " k2" : "") +
            (wp != 0.0 ? " w" + num(wp) : "");
  return r;
}

bool pure_normal(const MultiIndex& a, int k) {
  for (std::size_t i = 0; i + 1 < a.dim(); ++i)
    if (a[i] != 0) return false;
  return a.normal() == k;
}

/// All multi-indices with tangential part of order `tang` and normal order j.
std::vector<MultiIndex> split_indices(std::size_t dim, int tang, int j) {
  std::vector<MultiIndex> out;
  for (auto a : tangential_multi_indices(dim, tang)) {
    a[dim - 1] = j;
    out.push_back(a);
  }
  return out;
}

int rank(Growth g) { return g == Growth::Diverging ? 2 : g == Growth::Bounded ? 1 : 0; }

}  // namespace

std::string variant_name(NormVariant v) {
  switch (v) {
    case NormVariant::Full: return "full";
    case NormVariant::Hat: return "hat";
    case NormVariant::Tilde: return "tilde";
    case NormVariant::HatTilde: return "hat-tilde";
    case NormVariant::Domain: return "domain";
  }
  return "full";
}

NormVariant variant_from_name(const std::string& s) {
  if (s == "full") return NormVariant::Full;
  if (s == "hat") return NormVariant::Hat;
  if (s == "tilde") return NormVariant::Tilde;
  if (s == "hat-tilde") return NormVariant::HatTilde;
  if (s == "domain") return NormVariant::Domain;
  throw ConfigError("unknown norm variant: " + s);
}

nlohmann::json TermRecipe::to_json() const {
  static const char* ops[] = {"sup", "seminorm", "zygmund"};
  nlohmann::json j = {{"group", group},
                      {"label", label},
                      {"alpha", alpha.a},
                      {"time_order", time_order},
                      {"op", ops[static_cast<int>(op)]},
                      {"spec", spec.to_json()}};
  if (op == Op::Zygmund) j["zygmund"] = zygmund == ZygmundVariant::Tangential ? "tangential" : "time";
  if (!flag.empty()) j["flag"] = flag;
  return j;
}

nlohmann::json TermResult::to_json() const {
  nlohmann::json j = recipe.to_json();
  j["estimate"] = estimate.to_json();
  return j;
}

nlohmann::json NormBreakdown::to_json() const {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& r : terms) t.push_back(r.to_json());
  return {{"terms", t}, {"total", json_number(total)}};
}

nlohmann::json LadderTerms::to_json() const {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& r : terms) t.push_back(r.to_json());
  nlohmann::json g = nlohmann::json::object();
  for (const auto& [k, c] : groups) g[k] = c.to_json();
  return {{"terms", t}, {"groups", g}};
}

std::vector<TermRecipe> norm_terms(const SpaceParams& p, NormVariant v, bool parabolic, std::size_t dim) {
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), wg = p.omega() * g;
  std::vector<TermRecipe> out;
  const MultiIndex zero(dim);
  out.push_back(sup_term("sup", zero, 0));
  if (v == NormVariant::Tilde || v == NormVariant::HatTilde) {
    if (v == NormVariant::HatTilde) {
      if (!p.integer_n()) throw ConfigError("hat norms require integer n");
      out.push_back(dir_term("normal", MultiIndex::unit(dim, dim - 1, m - p.n_floor()), 0.0, dim - 1, g, wg));
    }
    for (std::size_t i = 0; i < dim; ++i)
      out.push_back(dir_term("pure", MultiIndex::unit(dim, i, m), n, i, g, wg));
    if (parabolic) out.push_back(time_term("time", zero, 1, 0.0, g / m));
    return out;
  }
  if (v == NormVariant::Domain) {
    for (const auto& a : multi_indices(dim, m)) out.push_back(iso_term("top", a, 0, n, g, wg));
    if (parabolic) out.push_back(time_term("time", zero, 1, 0.0, g / m));
    return out;
  }
  if (v == NormVariant::Hat && !p.integer_n()) throw ConfigError("hat norms require integer n");
  for (int k = 1; k < p.m_minus_n(); ++k)
    for (const auto& a : multi_indices(dim, k)) {
      out.push_back(sup_term("lower", a, 0));
      out.push_back(iso_term("lower", a, 0, 0.0, g, 0.0));
      if (parabolic) out.push_back(time_term("lower", a, 0, 0.0, g / m));
    }
  for (int j = 0; j <= p.n_floor(); ++j)
    for (const auto& a : multi_indices(dim, m - j)) {
      if (v == NormVariant::Full && p.integer_n() && pure_normal(a, m - p.n_floor())) continue;
      const double pw = n - j;
      out.push_back(sup_term("top", a, 0, pw));
      out.push_back(iso_term("top", a, 0, pw, g, wg));
      if (parabolic) out.push_back(time_term("top", a, 0, pw, g / m));
    }
  if (parabolic) {
    out.push_back(sup_term("time", zero, 1));
    out.push_back(iso_term("time", zero, 1, 0.0, g, wg));
    out.push_back(time_term("time", zero, 1, 0.0, g / m));
  }
  return out;
}

std::vector<TermRecipe> main_estimate_lhs_terms(const SpaceParams& p, bool parabolic, std::size_t dim) {
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), om = p.omega(), wg = om * g;
  const MultiIndex zero(dim);
  std::vector<TermRecipe> out;
  for (int j = 0; j <= p.n_floor(); ++j)
    for (const auto& a : multi_indices(dim, m - j)) {
      out.push_back(iso_term("G1", a, 0, n - j, g, wg));
      if (parabolic) out.push_back(time_term("G1", a, 0, n - j, g / m));
    }
  if (parabolic)
    for (int j = 0; j <= p.n_floor(); ++j)
      for (const auto& a : multi_indices(dim, m - j)) out.push_back(time_term("G2", a, 0, n - j * om, (g + j) / m));
  if (parabolic) {
    out.push_back(iso_term("G3", zero, 1, 0.0, g, wg));
    out.push_back(time_term("G3", zero, 1, 0.0, g / m));
  }
  const int mn_floor = int_part(p.m_minus_n());
  if (dim >= 2) {
    const double e4 = p.m_minus_n() + (1.0 - om) * g;
    const double f4 = frac_part(e4);
    const int i4 = int_part(e4);
    for (int j = 0; j <= mn_floor; ++j) {
      const bool edge = f4 == 0.0;
      const int tang = (edge ? i4 - 1 : i4) - j;
      if (tang < 0) continue;
      for (const auto& a : split_indices(dim, tang, j)) out.push_back(tangential_term("G4", a, f4, 0.0, edge));
    }
    const double e5 = p.m_minus_n() + g;
    const double f5 = frac_part(e5);
    const int i5 = int_part(e5);
    for (int j = 0; j <= mn_floor; ++j) {
      const bool edge = f5 == 0.0;
      const int tang = (edge ? i5 - 1 : i5) - j;
      if (tang < 0) continue;
      for (const auto& a : split_indices(dim, tang, j)) out.push_back(tangential_term("G5", a, f5, wg, edge));
    }
  }
  if (parabolic)
    for (int j = 1; j <= mn_floor; ++j)
      for (const auto& a : multi_indices(dim, j))
        out.push_back(time_term("G6", a, 0, 0.0, 1.0 - j / p.m_minus_n() + g / m));
  return out;
}

std::vector<TermRecipe> main_estimate_rhs_terms(const SpaceParams& p, bool parabolic, std::size_t dim) {
  std::vector<TermRecipe> out;
  const double g = p.gamma(), wg = p.omega() * g;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(dir_term("RHS", MultiIndex::unit(dim, i, p.m()), p.n(), i, g, wg));
  if (parabolic) out.push_back(time_term("RHS", MultiIndex(dim), 1, 0.0, g / p.m()));
  return out;
}

std::vector<TermRecipe> domain_lhs_terms(const SpaceParams& p, bool parabolic, std::size_t dim, bool vanishing) {
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), om = p.omega(), wg = om * g;
  std::vector<TermRecipe> out;
  for (int j = 0; j <= p.n_floor(); ++j)
    for (const auto& a : multi_indices(dim, m - j)) {
      out.push_back(iso_term("G1", a, 0, n - j, g, wg));
      if (parabolic) out.push_back(time_term("G1", a, 0, n - j, g / m));
    }
  if (parabolic) {
    for (int j = 0; j <= p.n_floor(); ++j)
      for (const auto& a : multi_indices(dim, m - j)) out.push_back(time_term("G2", a, 0, n - j * om, (g + j) / m));
    for (int j = 1; j <= int_part(p.m_minus_n()); ++j)
      for (const auto& a : multi_indices(dim, j))
        out.push_back(time_term("G6", a, 0, 0.0, 1.0 - j / p.m_minus_n() + g / m));
  }
  for (int k = 0; k < p.m_minus_n(); ++k)
    for (const auto& a : multi_indices(dim, k)) {
      out.push_back(sup_term("lower", a, 0));
      out.push_back(iso_term("lower", a, 0, 0.0, g, wg));
    }
  if (vanishing && p.integer_n())
    for (const auto& a : multi_indices(dim, m - p.n_floor())) {
      out.push_back(sup_term("vanishing", a, 0));
      out.push_back(iso_term("vanishing", a, 0, 0.0, g, wg));
    }
  for (auto& r : out) {
    const auto pos = r.label.find("x_N");
    if (pos != std::string::npos) r.label.replace(pos, 3, "d");
  }
  return out;
}

SeminormEstimate evaluate_term(const FieldSource& src, const TermRecipe& r, const Window& w) {
  switch (r.op) {
    case TermRecipe::Op::Sup: return sup_norm(*src.derivative(r.alpha, r.time_order, r.spec.pre_weight), w);
    case TermRecipe::Op::Zygmund:
      return zygmund_seminorm(*src.derivative(r.alpha, r.time_order, r.spec.pre_weight), w, r.zygmund,
                              r.spec.exponent);
    case TermRecipe::Op::Seminorm: break;
  }
  return estimate(src, r.alpha, r.time_order, r.spec, w);
}

SeminormEstimate evaluate_term(const FieldSource& src, const TermRecipe& r, const PointCloud& c,
                               const DomainGeometry& g) {
  auto f = src.derivative(r.alpha, r.time_order, r.spec.pre_weight, g);
  if (r.op == TermRecipe::Op::Sup) return cloud_sup(*f, c);
  if (r.op != TermRecipe::Op::Seminorm || r.spec.order != 1)
    throw ConfigError("point clouds support sup, isotropic and time terms only");
  if (r.spec.kind == PairKind::Time) return cloud_time_seminorm(*f, c, r.spec.exponent);
  if (r.spec.kind != PairKind::Isotropic) throw ConfigError("point clouds support isotropic pairs only");
  return cloud_seminorm(*f, c, r.spec.exponent, r.spec.weight_power, r.spec.convention);
}

namespace {

template <class Eval>
NormBreakdown collect(const std::vector<TermRecipe>& recipes, Eval&& eval) {
  NormBreakdown b;
  for (const auto& r : recipes) {
    TermResult t{r, eval(r)};
    b.total += t.estimate.value;
    b.terms.push_back(std::move(t));
  }
  if (std::isnan(b.total)) b.total = non_finite();
  return b;
}

}  // namespace

NormBreakdown evaluate_terms(const FieldSource& src, const std::vector<TermRecipe>& recipes, const Window& w) {
  return collect(recipes, [&](const TermRecipe& r) { return evaluate_term(src, r, w); });
}

NormBreakdown evaluate_terms(const FieldSource& src, const std::vector<TermRecipe>& recipes, const PointCloud& c,
                             const DomainGeometry& g) {
  return collect(recipes, [&](const TermRecipe& r) { return evaluate_term(src, r, c, g); });
}

NormBreakdown composite_norm(const FieldSource& u, const SpaceParams& p, NormVariant v, bool parabolic,
                             const Window& w) {
  if (v == NormVariant::Domain) throw ConfigError("domain norms need a disk window");
  return evaluate_terms(u, norm_terms(p, v, parabolic, w.dim()), w);
}

NormBreakdown composite_norm(const Expression& u, const SpaceParams& p, NormVariant v, const Window& w) {
  ExpressionSource src(u);
  return composite_norm(src, p, v, u.depends_on_time(), w);
}

NormBreakdown domain_norm(const FieldSource& u, const SpaceParams& p, bool parabolic, const DiskWindow& w) {
  auto cloud = w.cloud();
  return evaluate_terms(u, norm_terms(p, NormVariant::Domain, parabolic, cloud.dim), cloud, w.geometry);
}

LadderTerms evaluate_ladder(const FieldSource& src, const std::vector<TermRecipe>& recipes, const Window& base,
                            const Ladder& ladder, const GrowthOptions& opt) {
  LadderTerms out;
  for (const auto& r : recipes) out.terms.push_back({r, {}});
  for (double sc : ladder.scales) {
    Window w = ladder.rung(base, sc);
    for (auto& t : out.terms) {
      auto e = evaluate_term(src, t.recipe, w);
      t.estimate.trail.push_back({sc, w.levels, e.value});
      t.estimate.value = e.value;
      t.estimate.witness = e.witness;
    }
  }
  if (ladder.scales.size() >= 3) {
    for (auto& t : out.terms) {
      t.estimate.classification = classify_growth(t.estimate.trail, opt);
      auto it = out.groups.find(t.recipe.group);
      const auto& c = *t.estimate.classification;
      if (it == out.groups.end()) {
        out.groups[t.recipe.group] = c;
      } else if (rank(c.kind) > rank(it->second.kind) ||
                 (rank(c.kind) == rank(it->second.kind) && c.slope > it->second.slope)) {
        it->second = c;
      }
    }
  }
  return out;
}

LadderTerms main_estimate_lhs(const FieldSource& u, const SpaceParams& p, const Window& base, const Ladder& ladder,
                         const GrowthOptions& opt) {
  return evaluate_ladder(u, main_estimate_lhs_terms(p, u.time_dependent(), base.dim()), base, ladder, opt);
}

SeminormEstimate main_estimate_rhs(const FieldSource& u, const SpaceParams& p, const Window& w) {
  auto b = evaluate_terms(u, main_estimate_rhs_terms(p, u.time_dependent(), w.dim()), w);
  SeminormEstimate e;
  e.value = b.total;
  double best = -1.0;
  for (const auto& t : b.terms)
    if (t.estimate.value > best) {
      best = t.estimate.value;
      e.witness = t.estimate.witness;
    }
  return e;
}

}  // namespace wholder
