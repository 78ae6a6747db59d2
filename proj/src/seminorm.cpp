#include "wholder/seminorm.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "wholder/error.hpp"

namespace wholder {

namespace {

std::atomic<unsigned> g_threads{1};

double wpow(double x, double p) {
  if (p == 0.0) return 1.0;
  if (x <= 0.0) return p > 0.0 ? 0.0 : non_finite();
  return std::pow(x, p);
}

bool is_bad(double v) { return !(std::fabs(v) <= std::numeric_limits<double>::max()); }

/// Running maximum with the index tuple of the first maximizer.
struct Hit {
  double v = 0.0;
  bool inf = false;
  bool set = false;
  std::array<std::int64_t, 6> id{};

  void offer(double val, std::int64_t a, std::int64_t b = 0, std::int64_t c = 0, std::int64_t d = 0,
             std::int64_t e = 0, std::int64_t f = 0) {
    if (inf) return;
    if (is_bad(val)) {
      inf = true;
      set = true;
      v = non_finite();
      id = {a, b, c, d, e, f};
      return;
    }
    if (val > v) {
      v = val;
      set = true;
      id = {a, b, c, d, e, f};
    }
  }
};

Hit reduce(const std::vector<Hit>& hits) {
  Hit best;
  for (const auto& h : hits) {
    if (!h.set || best.inf) continue;
    if (h.inf || h.v > best.v) best = h;
  }
  return best;
}

double binom(int k, int i) {
  double r = 1.0;
  for (int j = 1; j <= i; ++j) r = r * (k - i + j) / j;
  return r;
}

std::vector<double> difference_coefficients(int k) {
  std::vector<double> c(k + 1);
  for (int i = 0; i <= k; ++i) c[i] = ((k - i) % 2 == 0 ? 1.0 : -1.0) * binom(k, i);
  return c;
}

/// Shared view of a sampled grid.
struct Sampled {
  Grid g;
  Grid::Values vals;
  std::size_t nl;
  std::size_t nt;
  std::size_t ns;
  std::vector<int> tidx;  // per tangential point, per axis

  Sampled(const Window& w, const Field& f) : g(w), vals(g.sample(f)) {
    nl = g.normal().size();
    nt = g.tangent_count();
    ns = g.space_size();
    const std::size_t na = g.dim() - 1;
    tidx.resize(nt * na);
    for (std::size_t t = 0; t < nt; ++t) {
      auto u = g.unflatten(t);
      for (std::size_t a = 0; a < na; ++a) tidx[t * na + a] = u[a];
    }
  }
  [[nodiscard]] double at(std::size_t slice, std::size_t t, std::size_t l) const {
    return vals.v[slice * ns + t * nl + l];
  }
  template <class I, class J>
  [[nodiscard]] std::vector<double> point(I t, J l) const {
    return g.point(static_cast<std::size_t>(t) * nl + static_cast<std::size_t>(l));
  }
  [[nodiscard]] std::vector<bool> adjacent() const {
    std::vector<bool> adj(nl);
    for (std::size_t l = 0; l < nl; ++l) adj[l] = g.boundary_adjacent(l);
    return adj;
  }
};

std::size_t stride_for(double total, std::size_t cap) {
  if (total <= static_cast<double>(cap)) return 1;
  return static_cast<std::size_t>(std::ceil(total / static_cast<double>(cap)));
}

SeminormEstimate finish(const Hit& h, Witness w) {
  SeminormEstimate e;
  e.value = h.inf ? non_finite() : h.v;
  if (h.set) e.witness = std::move(w);
  return e;
}

std::shared_ptr<const Field> borrow(const Field& f) {
  return std::shared_ptr<const Field>(&f, [](const Field*) {});
}

/// Isotropic first-difference sweep with a per-(offset, level pair) factor table.
/// Factor 0 marks pairs that are skipped.
template <class FactorRow>
SeminormEstimate isotropic_sweep(const Sampled& s, bool same_level_only, std::size_t cap, FactorRow&& row) {
  const std::size_t nl = s.nl, nt = s.nt, na = s.g.dim() - 1;
  std::vector<std::size_t> radix(na, 1);
  for (std::size_t a = na; a-- > 1;) radix[a - 1] = radix[a] * s.g.tangent(a).size();
  std::size_t noff = na == 0 ? 1 : radix[0] * s.g.tangent(0).size();
  const double per_pair = same_level_only ? static_cast<double>(nl) : static_cast<double>(nl * nl);
  const double total = static_cast<double>(s.vals.slices) *
                       (0.5 * static_cast<double>(nt) * static_cast<double>(nt) * per_pair);
  const std::size_t stride = stride_for(total, cap);
  auto adj = s.adjacent();
  std::vector<std::size_t> adj_levels, far_levels;
  for (std::size_t l = 0; l < nl; ++l) (adj[l] ? adj_levels : far_levels).push_back(l);

  // factor table, built lazily per offset when it fits in memory
  const bool tabulate = noff * nl * nl <= (std::size_t{1} << 23);
  std::vector<double> table;
  if (tabulate) {
    table.resize(noff * nl * nl);
    std::vector<double> buf(nl * nl);
    for (std::size_t off = 0; off < noff; ++off) {
      row(off, buf.data());
      std::copy(buf.begin(), buf.end(), table.begin() + off * nl * nl);
    }
  }

  const std::size_t jobs = s.vals.slices * nt;
  std::vector<Hit> hits(jobs);
  detail::parallel_for(jobs, [&](std::size_t job) {
    const std::size_t k = job / nt, a = job % nt;
    Hit h;
    std::vector<double> scratch(tabulate ? 0 : nl * nl);
    const double* va = &s.vals.v[k * s.ns + a * nl];
    for (std::size_t b = a; b < nt; ++b) {
      std::size_t off = 0, gap = 0;
      for (std::size_t ax = 0; ax < na; ++ax) {
        int d = std::abs(s.tidx[b * na + ax] - s.tidx[a * na + ax]);
        off += static_cast<std::size_t>(d) * radix[ax];
        gap += static_cast<std::size_t>(d);
      }
      const double* f;
      if (tabulate) {
        f = &table[off * nl * nl];
      } else {
        row(off, scratch.data());
        f = scratch.data();
      }
      const double* vb = &s.vals.v[k * s.ns + b * nl];
      const bool full = b == a || gap % stride == 0;
      auto visit = [&](std::size_t l1, std::size_t l2) {
        if (b == a && l2 <= l1) return;
        const double fac = f[l1 * nl + l2];
        if (fac == 0.0) return;
        h.offer(std::fabs(va[l1] - vb[l2]) * fac, static_cast<std::int64_t>(k), static_cast<std::int64_t>(a),
                static_cast<std::int64_t>(l1), static_cast<std::int64_t>(b), static_cast<std::int64_t>(l2));
      };
      if (same_level_only) {
        if (b == a) continue;
        for (std::size_t l = 0; l < nl; ++l)
          if (full || adj[l]) visit(l, l);
        continue;
      }
      if (full) {
        for (std::size_t l1 = 0; l1 < nl; ++l1)
          for (std::size_t l2 = 0; l2 < nl; ++l2) visit(l1, l2);
      } else {
        for (std::size_t l1 = 0; l1 < nl; ++l1)
          for (std::size_t l2 : adj_levels) visit(l1, l2);
        for (std::size_t l1 : adj_levels)
          for (std::size_t l2 : far_levels) visit(l1, l2);
      }
    }
    hits[job] = h;
  });
  Hit best = reduce(hits);
  Witness w;
  if (best.set) {
    w.x = s.point(best.id[1], best.id[2]);
    w.y = s.point(best.id[3], best.id[4]);
    w.t = w.s = s.vals.slice_times[best.id[0]];
    double d2 = 0.0;
    for (std::size_t i = 0; i < w.x.size(); ++i) d2 += (w.x[i] - w.y[i]) * (w.x[i] - w.y[i]);
    w.step = std::sqrt(d2);
  }
  return finish(best, std::move(w));
}

/// Fills dist^2 for every level pair at a tangential offset index.
struct OffsetGeometry {
  std::size_t na;
  std::vector<std::size_t> sizes;
  std::vector<double> spacing;
  const std::vector<double>* normal;

  explicit OffsetGeometry(const Grid& g) : na(g.dim() - 1), normal(&g.normal()) {
    for (std::size_t a = 0; a < na; ++a) {
      sizes.push_back(g.tangent(a).size());
      spacing.push_back(g.spacing(a));
    }
  }
  [[nodiscard]] double tangential_sq(std::size_t off) const {
    double d2 = 0.0;
    for (std::size_t a = na; a-- > 0;) {
      const double d = static_cast<double>(off % sizes[a]) * spacing[a];
      off /= sizes[a];
      d2 += d * d;
    }
    return d2;
  }
};

SeminormEstimate directional_sweep(const Sampled& s, const SeminormSpec& spec) {
  const std::size_t nl = s.nl, nt = s.nt, na = s.g.dim() - 1;
  const auto& xn = s.g.normal();
  const std::size_t axis = static_cast<std::size_t>(spec.axis);
  auto weight = [&](double x1, double x2) {
    const double base = spec.convention == WeightConvention::Max ? std::max(x1, x2) : std::min(x1, x2);
    return wpow(base, spec.weight_power);
  };
  const std::size_t jobs = s.vals.slices * nt;
  std::vector<Hit> hits(jobs);
  if (axis + 1 == s.g.dim()) {
    std::vector<double> fac(nl * nl, 0.0);
    for (std::size_t l1 = 0; l1 < nl; ++l1)
      for (std::size_t l2 = l1 + 1; l2 < nl; ++l2)
        fac[l1 * nl + l2] = weight(xn[l1], xn[l2]) / std::pow(std::fabs(xn[l1] - xn[l2]), spec.exponent);
    detail::parallel_for(jobs, [&](std::size_t job) {
      const std::size_t k = job / nt, a = job % nt;
      Hit h;
      const double* v = &s.vals.v[k * s.ns + a * nl];
      for (std::size_t l1 = 0; l1 < nl; ++l1)
        for (std::size_t l2 = l1 + 1; l2 < nl; ++l2) {
          const double f = fac[l1 * nl + l2];
          if (f == 0.0) continue;
          h.offer(std::fabs(v[l1] - v[l2]) * f, static_cast<std::int64_t>(k), static_cast<std::int64_t>(a),
                  static_cast<std::int64_t>(l1), static_cast<std::int64_t>(a), static_cast<std::int64_t>(l2));
        }
      hits[job] = h;
    });
  } else {
    if (axis >= na) throw ConfigError("directional axis out of range");
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < na; ++a) stride *= s.g.tangent(a).size();
    const std::size_t pa = s.g.tangent(axis).size();
    const double hstep = s.g.spacing(axis);
    std::vector<double> wl(nl), inv(pa, 0.0);
    for (std::size_t l = 0; l < nl; ++l) wl[l] = weight(xn[l], xn[l]);
    for (std::size_t d = 1; d < pa; ++d) inv[d] = 1.0 / std::pow(d * hstep, spec.exponent);
    detail::parallel_for(jobs, [&](std::size_t job) {
      const std::size_t k = job / nt, a = job % nt;
      Hit h;
      const int ia = s.tidx[a * na + axis];
      for (std::size_t d = 1; ia + d < pa; ++d) {
        const std::size_t b = a + d * stride;
        const double* va = &s.vals.v[k * s.ns + a * nl];
        const double* vb = &s.vals.v[k * s.ns + b * nl];
        for (std::size_t l = 0; l < nl; ++l) {
          if (wl[l] == 0.0) continue;
          h.offer(std::fabs(va[l] - vb[l]) * wl[l] * inv[d], static_cast<std::int64_t>(k),
                  static_cast<std::int64_t>(a), static_cast<std::int64_t>(l), static_cast<std::int64_t>(b),
                  static_cast<std::int64_t>(l));
        }
      }
      hits[job] = h;
    });
  }
  Hit best = reduce(hits);
  Witness w;
  if (best.set) {
    w.x = s.point(best.id[1], best.id[2]);
    w.y = s.point(best.id[3], best.id[4]);
    w.t = w.s = s.vals.slice_times[best.id[0]];
    w.step = std::fabs(w.x[axis] - w.y[axis]);
  }
  return finish(best, std::move(w));
}

std::shared_ptr<const Field> with_pre_weight(const Field& f, double p) {
  if (p == 0.0) return borrow(f);
  return std::make_shared<WeightedField>(borrow(f), p);
}

SeminormEstimate zero_estimate() { return {}; }

}  // namespace

void set_thread_budget(unsigned threads) { g_threads = std::max(1u, threads); }
unsigned thread_budget() { return g_threads; }

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("expected a number");
}

void SeminormSpec::validate() const {
  if (order < 1) throw ConfigError("difference order must be at least 1");
  if (!(exponent > 0.0)) throw ConfigError("Hoelder exponent must be positive");
  if (order == 1 && !(exponent <= 1.0)) throw ConfigError("first differences need exponent <= 1");
  if (order > 1 && !(exponent <= order)) throw ConfigError("exponent must not exceed the difference order");
  if (weight_power < 0.0) throw ConfigError("weight power must be nonnegative");
  if (restriction != EpsRestriction::None && !(eps > 0.0)) throw ConfigError("eps restriction needs eps > 0");
}

std::string SeminormSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case PairKind::Isotropic: os << "iso"; break;
    case PairKind::Directional: os << "dir" << axis; break;
    case PairKind::Tangential: os << "tan"; break;
    case PairKind::Time: os << "t"; break;
  }
  os << "[l=" << exponent;
  if (weight_power != 0.0) os << ",w=" << weight_power << (convention == WeightConvention::Max ? "max" : "min");
  if (pre_weight != 0.0) os << ",p=" << pre_weight;
  if (order != 1) os << ",k=" << order;
  if (restriction != EpsRestriction::None) os << (restriction == EpsRestriction::Below ? ",eps-" : ",eps+") << eps;
  os << "]";
  return os.str();
}

nlohmann::json SeminormSpec::to_json() const {
  static const char* kinds[] = {"isotropic", "directional", "tangential", "time"};
  static const char* restr[] = {"none", "below", "above"};
  return {{"kind", kinds[static_cast<int>(kind)]},
          {"axis", axis},
          {"exponent", exponent},
          {"weight_power", weight_power},
          {"convention", convention == WeightConvention::Max ? "max" : "min"},
          {"pre_weight", pre_weight},
          {"order", order},
          {"restriction", restr[static_cast<int>(restriction)]},
          {"eps", eps}};
}

SeminormSpec SeminormSpec::from_json(const nlohmann::json& j) {
  SeminormSpec s;
  try {
    const std::string k = j.value("kind", std::string("isotropic"));
    if (k == "isotropic") s.kind = PairKind::Isotropic;
    else if (k == "directional") s.kind = PairKind::Directional;
    else if (k == "tangential") s.kind = PairKind::Tangential;
    else if (k == "time") s.kind = PairKind::Time;
    else throw ConfigError("unknown seminorm kind: " + k);
    s.axis = j.value("axis", 0);
    s.exponent = j.value("exponent", 0.5);
    s.weight_power = j.value("weight_power", 0.0);
    s.convention = j.value("convention", std::string("max")) == "min" ? WeightConvention::Min : WeightConvention::Max;
    s.pre_weight = j.value("pre_weight", 0.0);
    s.order = j.value("order", 1);
    const std::string r = j.value("restriction", std::string("none"));
    s.restriction = r == "below" ? EpsRestriction::Below : r == "above" ? EpsRestriction::Above : EpsRestriction::None;
    s.eps = j.value("eps", 0.0);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed seminorm spec: ") + ex.what());
  }
  s.validate();
  return s;
}

std::string Classification::name() const {
  switch (kind) {
    case Growth::Zero: return "zero";
    case Growth::Bounded: return "bounded";
    case Growth::Diverging: return "diverging";
  }
  return "bounded";
}

nlohmann::json Classification::to_json() const { return {{"kind", name()}, {"slope", json_number(slope)}}; }

nlohmann::json Witness::to_json() const {
  nlohmann::json j = {{"x", x}, {"y", y}, {"t", t}, {"step", step}};
  if (s != t) j["s"] = s;
  return j;
}

bool SeminormEstimate::finite() const { return std::isfinite(value); }

nlohmann::json SeminormEstimate::to_json() const {
  nlohmann::json j = {{"value", json_number(value)}, {"witness", witness.to_json()}};
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& p : trail) tr.push_back({{"scale", p.scale}, {"levels", p.levels}, {"value", json_number(p.value)}});
  j["trail"] = tr;
  if (classification) j["classification"] = classification->to_json();
  return j;
}

double cc_distance(std::span<const double> x, std::span<const double> y, double omega) {
  if (x.size() != y.size() || x.empty()) throw DomainError("point dimension mismatch");
  if (x.back() < 0.0 || y.back() < 0.0) throw DomainError("points must lie in the closed half-space");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  if (d2 == 0.0) return 0.0;
  const double d = std::sqrt(d2);
  return d / (std::pow(d, omega) + std::pow(x.back(), omega) + std::pow(y.back(), omega));
}

SeminormEstimate weighted_seminorm(const Field& f0, const SeminormSpec& spec, const Window& w) {
  spec.validate();
  if (spec.kind == PairKind::Time) return time_seminorm(f0, spec.exponent, spec.pre_weight, w, spec.order);
  if (spec.order != 1) return kth_difference_seminorm(f0, spec, w);
  if (spec.restriction != EpsRestriction::None)
    return eps_restricted_seminorm(*with_pre_weight(f0, spec.pre_weight), spec.exponent, spec.weight_power, spec.eps,
                                   spec.restriction, w);
  auto f = with_pre_weight(f0, spec.pre_weight);
  Sampled s(w, *f);
  if (spec.kind == PairKind::Directional) return directional_sweep(s, spec);
  const auto& xn = s.g.normal();
  const std::size_t nl = s.nl;
  OffsetGeometry geo(s.g);
  std::vector<double> wt(nl * nl);
  for (std::size_t l1 = 0; l1 < nl; ++l1)
    for (std::size_t l2 = 0; l2 < nl; ++l2) {
      const double base =
          spec.convention == WeightConvention::Max ? std::max(xn[l1], xn[l2]) : std::min(xn[l1], xn[l2]);
      wt[l1 * nl + l2] = wpow(base, spec.weight_power);
    }
  const double half = -0.5 * spec.exponent;
  return isotropic_sweep(s, spec.kind == PairKind::Tangential, w.pair_cap, [&](std::size_t off, double* out) {
    const double t2 = geo.tangential_sq(off);
    for (std::size_t l1 = 0; l1 < nl; ++l1)
      for (std::size_t l2 = 0; l2 < nl; ++l2) {
        const double dn = xn[l1] - xn[l2];
        const double d2 = t2 + dn * dn;
        out[l1 * nl + l2] = d2 == 0.0 ? 0.0 : wt[l1 * nl + l2] * std::pow(d2, half);
      }
  });
}

SeminormEstimate weighted_seminorm(const Expression& f, const SeminormSpec& spec, const Window& w) {
  return estimate(f, spec, w);
}

SeminormEstimate cc_seminorm(const Field& f, double gamma, double omega, const Window& w) {
  Sampled s(w, f);
  const auto& xn = s.g.normal();
  const std::size_t nl = s.nl;
  OffsetGeometry geo(s.g);
  std::vector<double> xo(nl);
  for (std::size_t l = 0; l < nl; ++l) xo[l] = xn[l] > 0.0 ? std::pow(xn[l], omega) : 0.0;
  return isotropic_sweep(s, false, w.pair_cap, [&](std::size_t off, double* out) {
    const double t2 = geo.tangential_sq(off);
    for (std::size_t l1 = 0; l1 < nl; ++l1)
      for (std::size_t l2 = 0; l2 < nl; ++l2) {
        const double dn = xn[l1] - xn[l2];
        const double d2 = t2 + dn * dn;
        if (d2 == 0.0) {
          out[l1 * nl + l2] = 0.0;
          continue;
        }
        const double d = std::sqrt(d2);
        const double cc = d / (std::pow(d, omega) + xo[l1] + xo[l2]);
        out[l1 * nl + l2] = std::pow(cc, -gamma);
      }
  });
}

SeminormEstimate kth_difference_seminorm(const Field& f0, const SeminormSpec& spec, const Window& w) {
  spec.validate();
  if (spec.kind == PairKind::Time) return time_seminorm(f0, spec.exponent, spec.pre_weight, w, spec.order);
  auto f = with_pre_weight(f0, spec.pre_weight);
  Sampled s(w, *f);
  const int k = spec.order;
  const std::size_t nl = s.nl, nt = s.nt, na = s.g.dim() - 1;
  const auto& xn = s.g.normal();
  const double top = xn.front();
  const auto coef = difference_coefficients(k);

  const bool normal_steps = spec.kind == PairKind::Isotropic ||
                            (spec.kind == PairKind::Directional && static_cast<std::size_t>(spec.axis) == na);
  const bool tangential_steps = spec.kind != PairKind::Directional || static_cast<std::size_t>(spec.axis) < na;
  if (spec.kind == PairKind::Directional && static_cast<std::size_t>(spec.axis) > na)
    throw ConfigError("directional axis out of range");

  // off-grid normal values at x_l1 + i (x_l2 - x_l1), i = 2..k, for l2 < l1 (higher level)
  const std::size_t slices = s.vals.slices;
  auto off_index = [&](std::size_t slice, int i, std::size_t t, std::size_t l1, std::size_t l2) {
    return (((slice * (k - 1) + (i - 2)) * nt + t) * nl + l1) * nl + l2;
  };
  std::vector<double> offgrid;
  std::vector<char> fits(nl * nl, 0);
  for (std::size_t l1 = 0; l1 < nl; ++l1)
    for (std::size_t l2 = 0; l2 < l1; ++l2) fits[l1 * nl + l2] = xn[l1] + k * (xn[l2] - xn[l1]) <= top * (1 + 1e-12);
  if (normal_steps && k >= 2) {
    offgrid.assign(slices * (k - 1) * nt * nl * nl, 0.0);
    detail::parallel_for(nt, [&](std::size_t t) {
      auto p = s.point(t, std::size_t{0});
      for (std::size_t l1 = 0; l1 < nl; ++l1)
        for (std::size_t l2 = 0; l2 < l1; ++l2) {
          if (!fits[l1 * nl + l2]) continue;
          for (int i = 2; i <= k; ++i) {
            p.back() = xn[l1] + i * (xn[l2] - xn[l1]);
            for (std::size_t sl = 0; sl < slices; ++sl)
              offgrid[off_index(sl, i, t, l1, l2)] = f->value(p, s.vals.slice_times[sl]);
          }
        }
    });
  }

  // tangential step vectors d (grid multiples)
  std::vector<std::vector<int>> steps;
  if (tangential_steps) {
    std::vector<int> lo(na), hi(na);
    for (std::size_t a = 0; a < na; ++a) {
      const int p = static_cast<int>(s.g.tangent(a).size());
      const bool active = spec.kind != PairKind::Directional || static_cast<std::size_t>(spec.axis) == a;
      lo[a] = active ? -(p - 1) / k : 0;
      hi[a] = active ? (p - 1) / k : 0;
      if (spec.kind == PairKind::Directional) lo[a] = 0;
    }
    std::vector<int> d(lo);
    while (true) {
      steps.push_back(d);
      bool done = true;
      for (std::size_t a = na; a-- > 0;) {
        if (++d[a] <= hi[a]) {
          done = false;
          break;
        }
        d[a] = lo[a];
      }
      if (done) break;
    }
  } else {
    steps.push_back(std::vector<int>(na, 0));
  }
  auto positive = [](const std::vector<int>& d) {
    for (int v : d)
      if (v != 0) return v > 0;
    return false;
  };
  auto adj = s.adjacent();
  std::vector<double> base_w(nl);
  for (std::size_t l = 0; l < nl; ++l) base_w[l] = wpow(xn[l], spec.weight_power);
  const double total =
      static_cast<double>(slices * nt) * static_cast<double>(steps.size()) * static_cast<double>(nl) *
      (normal_steps ? 0.5 * static_cast<double>(nl) : 1.0);
  const std::size_t stride = stride_for(total, w.pair_cap);

  const std::size_t jobs = slices * nt;
  std::vector<Hit> hits(jobs);
  detail::parallel_for(jobs, [&](std::size_t job) {
    const std::size_t sl = job / nt, a = job % nt;
    Hit h;
    const int* ia = &s.tidx[a * na];
    std::vector<std::size_t> pts(k + 1);
    for (std::size_t si = 0; si < steps.size(); ++si) {
      const auto& d = steps[si];
      bool inside = true;
      int gap = 0;
      double t2 = 0.0;
      for (std::size_t ax = 0; ax < na; ++ax) {
        const int e = ia[ax] + k * d[ax];
        if (e < 0 || e >= static_cast<int>(s.g.tangent(ax).size())) inside = false;
        gap += std::abs(d[ax]);
        t2 += (d[ax] * s.g.spacing(ax)) * (d[ax] * s.g.spacing(ax));
      }
      if (!inside) continue;
      const bool full = static_cast<std::size_t>(gap) % stride == 0;
      for (int i = 0; i <= k; ++i) {
        std::vector<int> idx(na);
        for (std::size_t ax = 0; ax < na; ++ax) idx[ax] = ia[ax] + i * d[ax];
        pts[i] = s.g.flatten(idx);
      }
      const bool tangential_ok = spec.kind != PairKind::Directional || static_cast<std::size_t>(spec.axis) < na;
      for (std::size_t l1 = 0; l1 < nl; ++l1) {
        if (base_w[l1] == 0.0) continue;
        if (!full && !adj[l1]) continue;
        // same-level step
        if (tangential_ok && positive(d)) {
          double acc = 0.0;
          for (int i = 0; i <= k; ++i) acc += coef[i] * s.at(sl, pts[i], l1);
          h.offer(std::fabs(acc) * base_w[l1] / std::pow(t2, 0.5 * spec.exponent), static_cast<std::int64_t>(sl),
                  static_cast<std::int64_t>(a), static_cast<std::int64_t>(si), static_cast<std::int64_t>(l1),
                  static_cast<std::int64_t>(l1));
        }
        if (!normal_steps) continue;
        for (std::size_t l2 = 0; l2 < l1; ++l2) {
          if (!fits[l1 * nl + l2]) continue;
          const double dn = xn[l2] - xn[l1];
          double acc = coef[0] * s.at(sl, pts[0], l1);
          if (k >= 1) acc += coef[1] * s.at(sl, pts[1], l2);
          for (int i = 2; i <= k; ++i) acc += coef[i] * offgrid[off_index(sl, i, pts[i], l1, l2)];
          h.offer(std::fabs(acc) * base_w[l1] / std::pow(t2 + dn * dn, 0.5 * spec.exponent),
                  static_cast<std::int64_t>(sl), static_cast<std::int64_t>(a), static_cast<std::int64_t>(si),
                  static_cast<std::int64_t>(l1), static_cast<std::int64_t>(l2));
        }
      }
    }
    hits[job] = h;
  });
  Hit best = reduce(hits);
  Witness wit;
  if (best.set) {
    const auto& d = steps[best.id[2]];
    wit.x = s.point(best.id[1], best.id[3]);
    wit.y = wit.x;
    double t2 = 0.0;
    for (std::size_t ax = 0; ax < na; ++ax) {
      wit.y[ax] += d[ax] * s.g.spacing(ax);
      t2 += (d[ax] * s.g.spacing(ax)) * (d[ax] * s.g.spacing(ax));
    }
    const double dn = xn[best.id[4]] - xn[best.id[3]];
    wit.y.back() += dn;
    wit.step = std::sqrt(t2 + dn * dn);
    wit.t = wit.s = s.vals.slice_times[best.id[0]];
  }
  return finish(best, std::move(wit));
}

SeminormEstimate kth_difference_seminorm(const Expression& f, const SeminormSpec& spec, const Window& w) {
  SeminormSpec sp = spec;
  sp.pre_weight = 0.0;
  ExpressionField ef(pre_weight(f, spec.pre_weight));
  return kth_difference_seminorm(ef, sp, w);
}

SeminormEstimate time_seminorm(const Field& f, double beta, double weight_power, const Window& w, int order) {
  if (!(beta > 0.0) || beta > order) throw ConfigError("time exponent out of range");
  if (!f.time_dependent()) return zero_estimate();
  Sampled s(w, f);
  const std::size_t nl = s.nl, nt = s.nt, slices = s.vals.slices;
  if (slices < 2) return zero_estimate();
  const auto& xn = s.g.normal();
  const double dt = s.vals.slice_times[1] - s.vals.slice_times[0];
  const auto coef = difference_coefficients(order);
  std::vector<double> wl(nl);
  for (std::size_t l = 0; l < nl; ++l) wl[l] = wpow(xn[l], weight_power);
  std::vector<double> inv(slices, 0.0);
  for (std::size_t st = 1; st < slices; ++st) inv[st] = 1.0 / std::pow(st * dt, beta);
  std::vector<Hit> hits(nt);
  detail::parallel_for(nt, [&](std::size_t a) {
    Hit h;
    for (std::size_t l = 0; l < nl; ++l) {
      if (wl[l] == 0.0) continue;
      const std::size_t sp = a * nl + l;
      for (std::size_t st = 1; st * order < slices; ++st)
        for (std::size_t k0 = 0; k0 + st * order < slices; ++k0) {
          double acc = 0.0;
          for (int i = 0; i <= order; ++i) acc += coef[i] * s.vals.v[(k0 + i * st) * s.ns + sp];
          h.offer(std::fabs(acc) * wl[l] * inv[st], static_cast<std::int64_t>(a), static_cast<std::int64_t>(l),
                  static_cast<std::int64_t>(k0), static_cast<std::int64_t>(st));
        }
    }
    hits[a] = h;
  });
  Hit best = reduce(hits);
  Witness wit;
  if (best.set) {
    wit.x = s.point(best.id[0], best.id[1]);
    wit.y = wit.x;
    wit.t = s.vals.slice_times[best.id[2]];
    wit.s = s.vals.slice_times[best.id[2] + best.id[3]];
    wit.step = wit.s - wit.t;
  }
  return finish(best, std::move(wit));
}

SeminormEstimate time_seminorm(const Expression& f, double beta, double pw, const Window& w) {
  ExpressionField ef(pre_weight(f, pw));
  return time_seminorm(ef, beta, 0.0, w, 1);
}

SeminormEstimate zygmund_seminorm(const Field& f, const Window& w, ZygmundVariant variant, double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw ConfigError("Zygmund exponent must lie in (0,1]");
  Sampled s(w, f);
  const std::size_t nl = s.nl, nt = s.nt, slices = s.vals.slices, na = s.g.dim() - 1;
  const auto& xn = s.g.normal();
  const double top = xn.front();
  if (variant == ZygmundVariant::Time && slices < 2) return zero_estimate();
  // S(slice, t, l1, l2) = second x_N difference with theta = x_l2 - x_l1
  std::vector<double> sec(slices * nt * nl * nl, 0.0);
  std::vector<char> ok(nl * nl, 0);
  for (std::size_t l1 = 0; l1 < nl; ++l1)
    for (std::size_t l2 = 0; l2 < l1; ++l2) ok[l1 * nl + l2] = 2.0 * xn[l2] - xn[l1] <= top * (1 + 1e-12);
  detail::parallel_for(nt, [&](std::size_t t) {
    auto p = s.point(t, std::size_t{0});
    for (std::size_t l1 = 0; l1 < nl; ++l1)
      for (std::size_t l2 = 0; l2 < l1; ++l2) {
        if (!ok[l1 * nl + l2]) continue;
        p.back() = 2.0 * xn[l2] - xn[l1];
        for (std::size_t sl = 0; sl < slices; ++sl) {
          const double far = f.value(p, s.vals.slice_times[sl]);
          sec[((sl * nt + t) * nl + l1) * nl + l2] = far - 2.0 * s.at(sl, t, l2) + s.at(sl, t, l1);
        }
      }
  });
  auto adj = s.adjacent();
  std::vector<Hit> hits;
  if (variant == ZygmundVariant::Tangential) {
    OffsetGeometry geo(s.g);
    const double total = static_cast<double>(slices) * 0.25 * static_cast<double>(nt * nt) * static_cast<double>(nl * nl);
    const std::size_t stride = stride_for(total, w.pair_cap);
    const std::size_t jobs = slices * nt;
    hits.resize(jobs);
    detail::parallel_for(jobs, [&](std::size_t job) {
      const std::size_t sl = job / nt, a = job % nt;
      Hit h;
      for (std::size_t b = a + 1; b < nt; ++b) {
        double t2 = 0.0;
        std::size_t gap = 0;
        for (std::size_t ax = 0; ax < na; ++ax) {
          const int d = s.tidx[b * na + ax] - s.tidx[a * na + ax];
          t2 += (d * s.g.spacing(ax)) * (d * s.g.spacing(ax));
          gap += static_cast<std::size_t>(std::abs(d));
        }
        const bool full = gap % stride == 0;
        const double hp = std::pow(t2, 0.5 * exponent);
        for (std::size_t l1 = 0; l1 < nl; ++l1) {
          if (!full && !adj[l1]) continue;
          for (std::size_t l2 = 0; l2 < l1; ++l2) {
            if (!ok[l1 * nl + l2]) continue;
            const double theta = xn[l2] - xn[l1];
            const double diff =
                sec[((sl * nt + b) * nl + l1) * nl + l2] - sec[((sl * nt + a) * nl + l1) * nl + l2];
            h.offer(std::fabs(diff) / (theta * hp), static_cast<std::int64_t>(sl), static_cast<std::int64_t>(a),
                    static_cast<std::int64_t>(b), static_cast<std::int64_t>(l1), static_cast<std::int64_t>(l2));
          }
        }
      }
      hits[job] = h;
    });
  } else {
    const double dt = s.vals.slice_times[1] - s.vals.slice_times[0];
    hits.resize(nt);
    detail::parallel_for(nt, [&](std::size_t a) {
      Hit h;
      for (std::size_t l1 = 0; l1 < nl; ++l1)
        for (std::size_t l2 = 0; l2 < l1; ++l2) {
          if (!ok[l1 * nl + l2]) continue;
          const double theta = xn[l2] - xn[l1];
          for (std::size_t k1 = 0; k1 < slices; ++k1)
            for (std::size_t k2 = k1 + 1; k2 < slices; ++k2) {
              const double diff =
                  sec[((k2 * nt + a) * nl + l1) * nl + l2] - sec[((k1 * nt + a) * nl + l1) * nl + l2];
              h.offer(std::fabs(diff) / (theta * std::pow((k2 - k1) * dt, exponent)), static_cast<std::int64_t>(k1),
                      static_cast<std::int64_t>(a), static_cast<std::int64_t>(k2), static_cast<std::int64_t>(l1),
                      static_cast<std::int64_t>(l2));
            }
        }
      hits[a] = h;
    });
  }
  Hit best = reduce(hits);
  Witness wit;
  if (best.set) {
    const auto l1 = static_cast<std::size_t>(best.id[3]), l2 = static_cast<std::size_t>(best.id[4]);
    if (variant == ZygmundVariant::Tangential) {
      wit.x = s.point(best.id[1], l1);
      wit.y = s.point(best.id[2], l1);
      wit.t = wit.s = s.vals.slice_times[best.id[0]];
    } else {
      wit.x = wit.y = s.point(best.id[1], l1);
      wit.t = s.vals.slice_times[best.id[0]];
      wit.s = s.vals.slice_times[best.id[2]];
    }
    wit.step = xn[l2] - xn[l1];
  }
  return finish(best, std::move(wit));
}

SeminormEstimate zygmund_seminorm(const Expression& f, const Window& w, ZygmundVariant variant, double exponent) {
  return zygmund_seminorm(ExpressionField(f), w, variant, exponent);
}

SeminormEstimate eps_restricted_seminorm(const Field& f, double exponent, double weight_power, double eps,
                                         EpsRestriction mode, const Window& w) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(exponent > 0.0 && exponent <= 1.0)) throw ConfigError("exponent must lie in (0,1]");
  Sampled s(w, f);
  const std::size_t nl = s.nl, nt = s.nt, slices = s.vals.slices, na = s.g.dim() - 1;
  const auto& xn = s.g.normal();
  const double thetas[] = {1.0, 0.5, 0.25};
  const std::size_t jobs = slices * nt;
  std::vector<Hit> hits(jobs);
  const double total = static_cast<double>(slices) * static_cast<double>(nt * nt) * static_cast<double>(nl * nl);
  const std::size_t stride = stride_for(total, w.pair_cap);
  auto adj = s.adjacent();
  detail::parallel_for(jobs, [&](std::size_t job) {
    const std::size_t sl = job / nt, a = job % nt;
    const double time = s.vals.slice_times[sl];
    Hit h;
    for (std::size_t l1 = 0; l1 < nl; ++l1) {
      const double x = xn[l1];
      if (x <= 0.0) continue;
      const double wt = wpow(x, weight_power);
      const double lim = eps * x;
      const double v0 = s.at(sl, a, l1);
      for (std::size_t b = 0; b < nt; ++b) {
        double t2 = 0.0;
        std::size_t gap = 0;
        for (std::size_t ax = 0; ax < na; ++ax) {
          const int d = s.tidx[b * na + ax] - s.tidx[a * na + ax];
          t2 += (d * s.g.spacing(ax)) * (d * s.g.spacing(ax));
          gap += static_cast<std::size_t>(std::abs(d));
        }
        if (mode == EpsRestriction::Below && t2 > lim * lim) continue;
        const bool full = gap % stride == 0 || adj[l1];
        if (!full) continue;
        for (std::size_t l2 = 0; l2 < nl; ++l2) {
          const double dn = xn[l2] - x;
          const double d2 = t2 + dn * dn;
          if (d2 == 0.0) continue;
          const bool small = d2 <= lim * lim;
          if ((mode == EpsRestriction::Below) != small) continue;
          h.offer(std::fabs(s.at(sl, b, l2) - v0) * wt / std::pow(d2, 0.5 * exponent), static_cast<std::int64_t>(sl),
                  static_cast<std::int64_t>(a), static_cast<std::int64_t>(l1), static_cast<std::int64_t>(b),
                  static_cast<std::int64_t>(l2), -1);
        }
      }
      if (mode != EpsRestriction::Below) continue;
      auto p = s.point(a, l1);
      for (std::size_t ax = 0; ax <= na; ++ax)
        for (int ti = 0; ti < 3; ++ti)
          for (int sign = -1; sign <= 1; sign += 2) {
            const double step = sign * thetas[ti] * lim;
            auto q = p;
            q[ax] += step;
            if (ax < na && std::fabs(q[ax]) > w.tangent_half_width[ax] * (1 + 1e-12)) continue;
            if (ax == na && (q[ax] <= 0.0 || q[ax] > xn.front())) continue;
            const double v = f.value(q, time);
            h.offer(std::fabs(v - v0) * wt / std::pow(std::fabs(step), exponent), static_cast<std::int64_t>(sl),
                    static_cast<std::int64_t>(a), static_cast<std::int64_t>(l1), static_cast<std::int64_t>(ax),
                    static_cast<std::int64_t>(ti), sign);
          }
    }
    hits[job] = h;
  });
  Hit best = reduce(hits);
  Witness wit;
  if (best.set) {
    wit.x = s.point(best.id[1], best.id[2]);
    if (best.id[5] == -1) {
      wit.y = s.point(best.id[3], best.id[4]);
    } else {
      wit.y = wit.x;
      wit.y[best.id[3]] += best.id[5] * thetas[best.id[4]] * eps * wit.x.back();
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < wit.x.size(); ++i) d2 += (wit.x[i] - wit.y[i]) * (wit.x[i] - wit.y[i]);
    wit.step = std::sqrt(d2);
    wit.t = wit.s = s.vals.slice_times[best.id[0]];
  }
  return finish(best, std::move(wit));
}

SeminormEstimate sup_norm(const Field& f, const Window& w) {
  Sampled s(w, f);
  Hit h;
  for (std::size_t i = 0; i < s.vals.v.size(); ++i) h.offer(std::fabs(s.vals.v[i]), static_cast<std::int64_t>(i));
  Witness wit;
  if (h.set) {
    const auto i = static_cast<std::size_t>(h.id[0]);
    wit.x = wit.y = s.g.point(i % s.ns);
    wit.t = wit.s = s.vals.slice_times[i / s.ns];
  }
  return finish(h, std::move(wit));
}

SeminormEstimate sup_norm(const Expression& f, const Window& w) { return sup_norm(ExpressionField(f), w); }

namespace {

SeminormEstimate estimate_field(const Field& f, const SeminormSpec& spec, const Window& w) {
  spec.validate();
  if (spec.kind == PairKind::Time) return time_seminorm(f, spec.exponent, 0.0, w, spec.order);
  if (spec.order > 1) return kth_difference_seminorm(f, spec, w);
  return weighted_seminorm(f, spec, w);
}

}  // namespace

SeminormEstimate estimate(const Expression& f, const SeminormSpec& spec, const Window& w) {
  SeminormSpec sp = spec;
  sp.pre_weight = 0.0;
  ExpressionField ef(pre_weight(f, spec.pre_weight));
  return estimate_field(ef, sp, w);
}

SeminormEstimate estimate(const FieldSource& src, const MultiIndex& alpha, int time_order, const SeminormSpec& spec,
                          const Window& w) {
  SeminormSpec sp = spec;
  sp.pre_weight = 0.0;
  auto f = src.derivative(alpha, time_order, spec.pre_weight);
  return estimate_field(*f, sp, w);
}

SeminormEstimate cloud_seminorm(const Field& f, const PointCloud& c, double exponent, double weight_power,
                                WeightConvention conv) {
  auto vals = c.sample(f);
  const std::size_t n = c.size();
  std::vector<double> wd(n);
  std::vector<Hit> hits(vals.slices * n);
  detail::parallel_for(vals.slices * n, [&](std::size_t job) {
    const std::size_t sl = job / n, i = job % n;
    Hit h;
    const auto xi = c.point(i);
    const double vi = vals.v[sl * n + i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = c.point(j);
      double d2 = 0.0;
      for (std::size_t a = 0; a < c.dim; ++a) d2 += (xi[a] - xj[a]) * (xi[a] - xj[a]);
      if (d2 == 0.0) continue;
      const double base = conv == WeightConvention::Max ? std::max(c.dist[i], c.dist[j]) : std::min(c.dist[i], c.dist[j]);
      const double wt = wpow(base, weight_power);
      if (wt == 0.0) continue;
      h.offer(std::fabs(vi - vals.v[sl * n + j]) * wt / std::pow(d2, 0.5 * exponent), static_cast<std::int64_t>(sl),
              static_cast<std::int64_t>(i), static_cast<std::int64_t>(j));
    }
    hits[job] = h;
  });
  Hit best = reduce(hits);
  Witness wit;
  if (best.set) {
    auto xi = c.point(best.id[1]), xj = c.point(best.id[2]);
    wit.x.assign(xi.begin(), xi.end());
    wit.y.assign(xj.begin(), xj.end());
    double d2 = 0.0;
    for (std::size_t a = 0; a < c.dim; ++a) d2 += (wit.x[a] - wit.y[a]) * (wit.x[a] - wit.y[a]);
    wit.step = std::sqrt(d2);
    wit.t = wit.s = vals.slice_times[best.id[0]];
  }
  return finish(best, std::move(wit));
}

SeminormEstimate cloud_time_seminorm(const Field& f, const PointCloud& c, double beta) {
  if (!f.time_dependent() || c.times.size() < 2) return zero_estimate();
  auto vals = c.sample(f);
  const std::size_t n = c.size(), slices = vals.slices;
  const double dt = vals.slice_times[1] - vals.slice_times[0];
  std::vector<Hit> hits(n);
  detail::parallel_for(n, [&](std::size_t i) {
    Hit h;
    for (std::size_t k1 = 0; k1 < slices; ++k1)
      for (std::size_t k2 = k1 + 1; k2 < slices; ++k2)
        h.offer(std::fabs(vals.v[k2 * n + i] - vals.v[k1 * n + i]) / std::pow((k2 - k1) * dt, beta),
                static_cast<std::int64_t>(i), static_cast<std::int64_t>(k1), static_cast<std::int64_t>(k2));
    hits[i] = h;
  });
  Hit best = reduce(hits);
  Witness wit;
  if (best.set) {
    auto x = c.point(best.id[0]);
    wit.x.assign(x.begin(), x.end());
    wit.y = wit.x;
    wit.t = vals.slice_times[best.id[1]];
    wit.s = vals.slice_times[best.id[2]];
    wit.step = wit.s - wit.t;
  }
  return finish(best, std::move(wit));
}

SeminormEstimate cloud_sup(const Field& f, const PointCloud& c) {
  auto vals = c.sample(f);
  Hit h;
  for (std::size_t i = 0; i < vals.v.size(); ++i) h.offer(std::fabs(vals.v[i]), static_cast<std::int64_t>(i));
  Witness wit;
  if (h.set) {
    const auto i = static_cast<std::size_t>(h.id[0]);
    auto x = c.point(i % c.size());
    wit.x.assign(x.begin(), x.end());
    wit.y = wit.x;
    wit.t = wit.s = vals.slice_times[i / c.size()];
  }
  return finish(h, std::move(wit));
}

double fit_slope(const std::vector<double>& scales, const std::vector<double>& values) {
  if (scales.size() != values.size() || scales.size() < 2) throw TooFewRungsError("slope fit needs two points");
  const std::size_t n = scales.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) return std::numeric_limits<double>::infinity();
    const double x = std::log(scales[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw ConfigError("slope fit needs distinct scales");
  return (n * sxy - sx * sy) / den;
}

Classification classify_growth(const std::vector<TrailPoint>& trail, const GrowthOptions& opt) {
  if (trail.size() < 3) throw TooFewRungsError("growth classification needs at least 3 rungs");
  Classification c;
  bool all_zero = true, any_bad = false, monotone = true;
  for (std::size_t i = 0; i < trail.size(); ++i) {
    const double v = trail[i].value;
    if (!std::isfinite(v)) any_bad = true;
    if (!(std::fabs(v) < opt.atol)) all_zero = false;
    if (i > 0 && !(v >= trail[i - 1].value)) monotone = false;
  }
  if (any_bad) {
    c.kind = Growth::Diverging;
    c.slope = std::numeric_limits<double>::infinity();
    return c;
  }
  if (all_zero) {
    c.kind = Growth::Zero;
    c.slope = 0.0;
    return c;
  }
  std::vector<double> xs, ys;
  for (const auto& p : trail) {
    xs.push_back(p.scale);
    ys.push_back(std::max(std::fabs(p.value), opt.atol));
  }
  c.slope = fit_slope(xs, ys);
  c.kind = c.slope > opt.slope_threshold && monotone ? Growth::Diverging : Growth::Bounded;
  return c;
}

SeminormEstimate run_ladder(const std::function<SeminormEstimate(const Window&)>& est, const Window& base,
                            const Ladder& ladder, const GrowthOptions& opt) {
  SeminormEstimate out;
  std::vector<TrailPoint> trail;
  for (double sc : ladder.scales) {
    Window w = ladder.rung(base, sc);
    SeminormEstimate e = est(w);
    trail.push_back({sc, w.levels, e.value});
    out.value = e.value;
    out.witness = e.witness;
  }
  out.trail = trail;
  if (trail.size() >= 3) out.classification = classify_growth(trail, opt);
  return out;
}

}  // namespace wholder
