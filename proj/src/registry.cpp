#include <chrono>
#include <functional>
#include <map>

#include "checks_common.hpp"
#include "wholder/error.hpp"

namespace wholder {

namespace {

using detail::bump;
using X = Expression;

struct Entry {
  CheckInfo info;
  std::function<VerificationReport(const CheckCase&)> run;
};

std::vector<SpaceParams> all_sets() { return default_param_sets(); }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {{"embedding", "weighted seminorm controls the unweighted one of lower order", Expectation::RatioBounded, all_sets()},
       detail::check_embedding},
      {{"k-difference", "first-difference and k-th difference weighted seminorms are two-sided comparable",
        Expectation::TwoSided, all_sets()},
       detail::check_kdiff_equivalence},
      {{"min-max-weight", "weights at the larger and smaller boundary distance give comparable seminorms",
        Expectation::TwoSided, all_sets()},
       detail::check_minmax_weight},
      {{"eps-restriction", "seminorm over short steps controls the full seminorm with eps^{-1-gamma}",
        Expectation::RatioBounded, all_sets()},
       detail::check_eps_restriction},
      {{"cc-metric", "weighted seminorm against the quasi-metric form", Expectation::TwoSided, all_sets()},
       detail::check_cc_metric},
      {{"main-estimate", "lower-order and mixed terms bounded by the pure top-order seminorms",
        Expectation::RatioBounded, all_sets()},
       detail::check_main_estimate},
      {{"counterexample", "right side vanishes while a mixed seminorm diverges", Expectation::LhsDivergesRhsZero,
        {SpaceParams(2, 0.5, 0.5), SpaceParams(2, 0.0, 0.5)}},
       detail::check_counterexample},
      {{"lower-order", "pure normal derivatives of lower order, boundary-value criterion and Zygmund bound",
        Expectation::IffSplit, all_sets()},
       detail::check_lower_order},
      {{"general-domain", "main estimate on a disk with the boundary distance as weight", Expectation::RatioBounded,
        all_sets()},
       detail::check_general_domain},
      {{"small-time", "norms over [0, T] of functions vanishing at t = 0 decay with a power of T",
        Expectation::SlopeAtLeast, all_sets()},
       detail::check_small_time},
      {{"trace-extension", "Poisson extension: trace, decay, norm bound and interpolation probes",
        Expectation::RatioBounded, {SpaceParams(2, 1.0, 0.25)}},
       detail::check_trace_extension},
      {{"interpolation", "eps-interpolation between mixed and pure top derivatives, sup bound with an h sweep",
        Expectation::RatioBounded, all_sets()},
       detail::check_interpolation},
  };
  return e;
}

const Entry& find(const std::string& id) {
  for (const auto& e : entries())
    if (e.info.id == id) return e;
  throw UnknownCheckError("unknown check id: " + id);
}

Member member(std::string name, Expression u, std::string note = {}) {
  Member m;
  m.name = std::move(name);
  m.u = std::move(u);
  m.note = std::move(note);
  return m;
}

Member boundary_member(std::string name, nlohmann::json boundary, std::string note = {}) {
  Member m;
  m.name = std::move(name);
  m.u = X::constant(0.0);
  m.boundary = std::move(boundary);
  m.note = std::move(note);
  return m;
}

Expression space_time_bump(const SpaceParams& p) {
  CutoffSpec s;
  s.center = {0.0, 0.0};
  s.t_weight = 1.0;
  s.r_inner = 0.5;
  s.r_outer = 1.0;
  s.order = p.m() + 2;
  return make_cutoff(s, p);
}

Ladder window_ladder(std::vector<double> s) { return {Ladder::Kind::Window, std::move(s)}; }
Ladder depth_ladder(std::vector<double> s) { return {Ladder::Kind::Depth, std::move(s)}; }

}  // namespace

std::vector<CheckInfo> list_cases() {
  std::vector<CheckInfo> out;
  for (const auto& e : entries()) out.push_back(e.info);
  return out;
}

CheckCase default_case(const std::string& id, const SpaceParams& p) {
  const Entry& e = find(id);
  CheckCase c;
  c.id = id;
  c.params = p;
  c.expectation = e.info.expectation;
  c.window.tangent_half_width = {1.0};
  const int m = p.m();
  const double n = p.n(), g = p.gamma(), om = p.omega();
  const X b = bump(2, p);
  const X x1 = X::coordinate(0), xn1 = X::boundary_power(1.0);
  const X zero = X::constant(0.0), one = X::constant(1.0);

  if (id == "embedding") {
    c.family = {member("constant", one, "both sides vanish"), member("tangential", b * x1),
                member("boundary power", b * X::boundary_power((1.0 - om) * g), "unweighted exponent of the embedding")};
    c.ladder = depth_ladder({1, 4, 16});
  } else if (id == "k-difference") {
    c.family = {member("constant", one), member("gauge power", b * X::boundary_power(p.m_minus_n())),
                member("tangential", b * x1), member("boundary power", b * X::boundary_power((1.0 - om) * g))};
    c.window.levels = 16;
    c.window.tangent_points = 13;
    c.ladder = window_ladder({1});
    c.options = {{"k", 2}, {"lower", 1e-2}, {"upper", 1e2}, {"refinement_change", 0.1}};
  } else if (id == "min-max-weight") {
    c.family = {member("constant", one), member("boundary power", b * X::boundary_power(g)),
                member("tangential", b * x1)};
    c.ladder = depth_ladder({1, 4, 16});
  } else if (id == "eps-restriction") {
    c.family = {member("constant", one), member("boundary power", b * X::boundary_power((1.0 - om) * g)),
                member("tangential", b * x1)};
    c.ladder = window_ladder({1});
    c.options = {{"eps", {0.5, 0.25, 0.125}}};
  } else if (id == "cc-metric") {
    c.family = {member("constant", one), member("tangential", b * x1),
                member("boundary power", b * X::boundary_power((1.0 - om) * g))};
    c.ladder = depth_ladder({1, 4, 16});
  } else if (id == "main-estimate") {
    c.family = {
        member("tangential top", b * X::coordinate(0, m)),
        member("tangential linear", b * x1),
        member("gauge power", b * X::boundary_power(p.m_minus_n())),
        member("mixed linear", b * x1 * xn1),
        member("above gauge", b * X::boundary_power(p.m_minus_n() + g)),
        member("parabolic", X::time_power(1) * space_time_bump(p) * X::coordinate(0, 2), "cutoff in x and t"),
    };
    c.window.tangent_points = 25;
    c.window.levels = 16;
    c.window.normal_uniform = 24;
    c.window.time_points = 9;
    c.window.pair_cap = std::size_t{1} << 26;
    c.ladder = window_ladder({1, 2, 4});
    c.options = {{"ratio_stability", 0.2}, {"vanishing_height", 1e-12}, {"vanishing_tolerance", 1e-4}};
  } else if (id == "counterexample") {
    c.family = {member("mixed power", X::coordinate(0, 2) * X::boundary_power(2.0 - n),
                       "pure top derivatives vanish identically")};
    c.window.tangent_points = 9;
    c.window.levels = 16;
    c.ladder = window_ladder({1, 2, 4, 8});
    c.options = {{"slope_tolerance", 0.15}};
  } else if (id == "lower-order") {
    const X wide = bump(2, p, 2.0, 4.0);
    if (p.integer_n()) {
      c.family = {member("vanishing", wide * X::boundary_power(m), "weighted top derivative vanishes on the boundary"),
                  member("log gauge", wide * X::iterated_log(p.m_minus_n()),
                         "weighted top derivative has a nonzero boundary value"),
                  member("tangential", wide * X::coordinate(0, 2) * X::boundary_power(m))};
    } else {
      c.family = {member("gauge power", b * X::boundary_power(p.m_minus_n()), "support inside the window"),
                  member("tangential square", b * X::coordinate(0, 2))};
    }
    c.window.include_boundary = false;
    c.window.levels = 12;
    c.window.tangent_points = 9;
    c.ladder = depth_ladder({1, 4, 16, 64});
  } else if (id == "general-domain") {
    CutoffSpec s;
    s.center = {0.0, 0.5};
    s.r_inner = 0.3;
    s.r_outer = 0.6;
    s.order = m + 2;
    const X local = make_cutoff(s, p);
    DiskSpec d{{0.0, 1.5}, 1.0};
    c.family = {member("zero", zero), member("distance power", local * X::distance_power(d, p.m_minus_n())),
                member("low polynomial", x1 + X::constant(2.0), "top-order terms vanish")};
    c.ladder = depth_ladder({1, 4, 16});
    c.options = {{"vanishing", true}, {"disk", {{"center", {0.0, 1.5}}, {"radius", 1.0}, {"levels", 14}, {"angles", 32}}}};
  } else if (id == "small-time") {
    const X t2 = X::time_power(2);
    c.family = {member("gauge power", t2 * b * X::boundary_power(p.m_minus_n())), member("tangential", t2 * x1 * b)};
    c.window.tangent_points = 9;
    c.window.levels = 12;
    c.window.time_points = 9;
    c.ladder = window_ladder({1});
    c.options = {{"T", {1.0, 0.5, 0.25, 0.125}}, {"slope_slack", 0.05}};
  } else if (id == "trace-extension") {
    const double l = p.m_minus_n() + (1.0 - om) * g;
    c.family = {
        boundary_member("zero", {{"kind", "plateau"}, {"c", 0.0}, {"r_in", 1.0}, {"r_out", 2.0}}),
        boundary_member("cosine", {{"kind", "windowed-cosine"}, {"xi", 1.0}, {"r_in", 40.0}, {"r_out", 60.0}}),
        boundary_member("kink", {{"kind", "power-kink"}, {"l", l}, {"r_in", 1.0}, {"r_out", 2.0}},
                        "boundary smoothness equal to the target class"),
        boundary_member("gaussian", {{"kind", "windowed-gaussian"}, {"width", 0.5}, {"r_in", 1.5}, {"r_out", 2.5}}),
    };
    c.window.tangent_half_width = {1.0};
    c.window.levels = 10;
    c.window.tangent_points = 9;
    c.window.pair_cap = std::size_t{1} << 18;
    c.window.include_boundary = false;
    c.ladder = depth_ladder({1, 4, 16});
  } else if (id == "interpolation") {
    c.family = {member("zero", zero),
                member("sum", b * (X::coordinate(0, m) + X::boundary_power(p.m_minus_n()))),
                member("mixed", b * X::coordinate(0, m - 1) * xn1)};
    c.window.tangent_points = 13;
    c.window.levels = 16;
    c.ladder = window_ladder({1});
    c.options = {{"axes", {0, 1}}, {"exponent_tolerance", 0.1}, {"support_radius", 1.0}};
  }
  return c;
}

VerificationReport run_check(const CheckCase& c) {
  const Entry& e = find(c.id);
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r = e.run(c);
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace wholder
