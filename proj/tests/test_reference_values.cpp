#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "wholder/error.hpp"
#include "wholder/expression.hpp"
#include "wholder/field.hpp"
#include "wholder/norms.hpp"
#include "wholder/operators.hpp"
#include "wholder/seminorm.hpp"

using namespace wholder;
using X = Expression;

namespace {

double at(const Expression& e, std::vector<double> x, double t = 0.0) { return e.evaluate(x, t); }

Window window(int levels = 8, int tangent_points = 9) {
  Window w;
  w.levels = levels;
  w.tangent_points = tangent_points;
  w.time_points = 5;
  return w;
}

X bump(const SpaceParams& p, double r_in = 0.5, double r_out = 1.0) {
  CutoffSpec s;
  s.center = {0.0, 0.0};
  s.r_inner = r_in;
  s.r_outer = r_out;
  s.order = p.m() + 2;
  return make_cutoff(s, p);
}

// max over x_1 in [0, r_out] of |d^s/dx_1^s eta(x_1, 0)|
double cutoff_derivative_max(const SpaceParams& p, double r_in, double r_out, int s) {
  const X d = differentiate(bump(p, r_in, r_out), MultiIndex::unit(2, 0, s));
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) best = std::max(best, std::fabs(at(d, {r_out * i / 20000.0, 0.0})));
  return best;
}

}  // namespace

TEST_CASE("symbolic derivatives") {
  const std::vector<double> x{0.3, 0.4};
  CHECK(at(differentiate(X::boundary_power(2.5), {0, 1}), x) == doctest::Approx(2.5 * std::pow(0.4, 1.5)));
  CHECK(at(differentiate(X::iterated_log(1), {0, 1}), x) == doctest::Approx(std::log(0.4)));
  const X u = X::coordinate(0, 2) * X::boundary_power(1.5);
  CHECK(at(differentiate(u, {2, 0}), x) == doctest::Approx(2.0 * std::pow(0.4, 1.5)));
}

TEST_CASE("point evaluation") {
  CHECK(at(X::boundary_power(0.5), {0.0, 4.0}) == doctest::Approx(2.0));
  CHECK(at(X::iterated_log(1), {0.0, 1.0}) == doctest::Approx(-1.0));
  CHECK_FALSE(std::isfinite(at(X::boundary_power(-0.5), {0.0, 0.0})));
  CHECK(iterated_log(2, 1.0) == doctest::Approx(-0.75));
  CHECK(std::fabs(iterated_log(1, 1e-12)) < 1e-10);
}

TEST_CASE("cutoff derivatives scale with the transition width") {
  const SpaceParams p(2, 0.5, 0.5);
  CHECK(at(bump(p), {0.0, 0.0}) == 1.0);
  CHECK(at(bump(p), {1.5, 0.0}) == 0.0);
  for (int s = 1; s <= p.m(); ++s) {
    const double wide = cutoff_derivative_max(p, 1.0, 2.0, s);
    const double narrow = cutoff_derivative_max(p, 1.0, 1.5, s);
    const double ratio = narrow / wide;
    CHECK(ratio > 0.7 * std::pow(2.0, s));
    CHECK(ratio < 1.3 * std::pow(2.0, s));
  }
}

TEST_CASE("finite-difference consistency") {
  CHECK(fd_consistency(X::constant(2.0), {1, 1}, 1e-3) == 0.0);
  // the central second difference is exact on cubics, so only roundoff remains
  CHECK(fd_consistency(X::boundary_power(3.0), {0, 2}, 1e-2) < 1e-8);
  const double e1 = fd_consistency(X::boundary_power(3.5), {0, 2}, 1e-2);
  const double e2 = fd_consistency(X::boundary_power(3.5), {0, 2}, 5e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(fd_consistency(X::coordinate(0) * X::boundary_power(1.0), {1, 1}, 1e-3) <= 1e-10);
}

TEST_CASE("quasi-metric values") {
  const std::vector<double> a{0.0, 1.0}, b{1.0, 1.0}, c{0.0, 0.0};
  CHECK(cc_distance(a, b, 0.3) == doctest::Approx(1.0 / 3.0));
  CHECK(cc_distance(a, a, 0.3) == 0.0);
  CHECK(cc_distance(c, a, 0.3) == doctest::Approx(0.5));
  CHECK(cc_distance(c, a, 0.8) == doctest::Approx(0.5));
}

TEST_CASE("constant fields have zero seminorms") {
  Ladder l;
  l.kind = Ladder::Kind::Window;
  l.scales = {1, 2, 4};
  SeminormSpec s;
  s.weight_power = 0.25;
  const auto e = run_ladder([](const Window& w) { return weighted_seminorm(X::constant(3.0), SeminormSpec{}, w); },
                            window(), l);
  CHECK(e.value == 0.0);
  REQUIRE(e.classification);
  CHECK(e.classification->kind == Growth::Zero);
}

TEST_CASE("weighted seminorm of x_N attains its corner value") {
  SeminormSpec s;
  s.exponent = 0.5;
  s.weight_power = 0.25;
  const auto e = weighted_seminorm(X::boundary_power(1.0), s, window(12, 5));
  CHECK(e.value == doctest::Approx(1.0));
  CHECK(e.witness.step == doctest::Approx(1.0));
}

TEST_CASE("k-th differences") {
  SeminormSpec s;
  s.kind = PairKind::Directional;
  s.axis = 0;
  s.order = 2;
  s.exponent = 1.5;
  CHECK(kth_difference_seminorm(X::coordinate(0, 2), s, window()).value == doctest::Approx(2.0));
  CHECK(kth_difference_seminorm(X::coordinate(0) + 2.0 * X::boundary_power(1.0), s, window()).value < 1e-12);

  const SpaceParams p(2, 0.5, 0.5);
  SeminormSpec k;
  k.kind = PairKind::Isotropic;
  k.order = p.m() + 1;
  k.exponent = p.m() + p.gamma();
  k.weight_power = p.omega() * p.gamma();
  SeminormSpec top;
  top.kind = PairKind::Directional;
  top.axis = 1;
  top.exponent = p.gamma();
  top.weight_power = p.omega() * p.gamma();
  Ladder l;
  l.kind = Ladder::Kind::Depth;
  l.scales = {1, 4, 16};
  auto growth = [&](const X& f) {
    const auto kd = run_ladder([&](const Window& w) { return kth_difference_seminorm(f, k, w); }, window(), l);
    const X d2 = differentiate(f, {0, 2});
    const auto fd = run_ladder([&](const Window& w) { return weighted_seminorm(d2, top, w); }, window(), l);
    return std::pair{kd.classification->kind, fd.classification->kind};
  };
  // inside the class both sides stay bounded
  const auto in = growth(X::boundary_power(p.m() + p.gamma()));
  CHECK(in.first == Growth::Bounded);
  CHECK(in.second == Growth::Bounded);
  // x_N^{m-n} has D^m u ~ x_N^{-n}: both sides diverge together
  const auto out = growth(X::boundary_power(p.m_minus_n()));
  CHECK(out.first == Growth::Diverging);
  CHECK(out.second == Growth::Diverging);
}

TEST_CASE("time seminorms") {
  Window w = window();
  w.time_points = 9;
  CHECK(time_seminorm(X::coordinate(0), 0.5, 0.0, w).value == 0.0);
  CHECK(time_seminorm(X::time_power(1), 0.5, 0.0, w).value == doctest::Approx(1.0));
  CHECK(time_seminorm(X::time_power(1) * X::boundary_power(-0.25), 1.0, 0.25, w).value == doctest::Approx(1.0));
}

TEST_CASE("Zygmund seminorms") {
  const Window w = window();
  CHECK(zygmund_seminorm(X::coordinate(0) * X::boundary_power(1.0), w, ZygmundVariant::Tangential, 0.25).value <
        1e-12);
  CHECK(zygmund_seminorm(X::boundary_power(2.5), w, ZygmundVariant::Tangential, 0.25).value == 0.0);
  CHECK(zygmund_seminorm(X::boundary_power(2.5), w, ZygmundVariant::Time, 0.25).value == 0.0);
  const double v = zygmund_seminorm(X::boundary_power(2.0) * X::coordinate(0), w, ZygmundVariant::Tangential, 0.25).value;
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
}

TEST_CASE("composite norms and the right side of the main estimate") {
  const SpaceParams p(2, 0.5, 0.5);
  const Window w = window();
  for (const auto& t : composite_norm(X::constant(0.0), p, NormVariant::Full, w).terms) CHECK(t.estimate.value == 0.0);
  CHECK(main_estimate_rhs(ExpressionSource(X::constant(0.0)), p, w).value == 0.0);
  const X mixed = X::coordinate(0, 2) * X::boundary_power(1.5);
  CHECK(main_estimate_rhs(ExpressionSource(mixed), p, w).value < 1e-12);

  const X u = bump(p) * X::boundary_power(1.5);
  const auto tilde = composite_norm(u, p, NormVariant::Tilde, w);
  CHECK(std::isfinite(tilde.total));
  const auto top = ExpressionSource(u).derivative({0, 2}, 0, p.n());
  for (double xn : {1e-4, 0.01, 0.1}) {
    const std::vector<double> x{0.1, xn};
    CHECK(top->value(x, 0.0) == doctest::Approx(0.75).epsilon(1e-12));
  }
  CHECK(std::isfinite(main_estimate_rhs(ExpressionSource(u), p, w).value));
}

TEST_CASE("growth of a power-law trail") {
  std::vector<TrailPoint> t{{1, 0, 1.0}, {2, 0, 3.09}, {4, 0, 9.5}, {8, 0, 29.3}};
  const auto c = classify_growth(t);
  CHECK(c.kind == Growth::Diverging);
  CHECK(c.slope == doctest::Approx(1.625).epsilon(0.01));
  CHECK(classify_growth({{1, 0, 1.0}, {2, 0, 1.02}, {4, 0, 1.01}}).kind == Growth::Bounded);
}

TEST_CASE("mollification") {
  const std::vector<double> x{0.3, 0.2};
  CHECK(mollify(X::boundary_power(1.5), 0.25)->value(x, 0.0) == doctest::Approx(std::pow(0.2, 1.5)).epsilon(1e-10));
  CHECK(mollify(X::coordinate(0) + X::time_power(1), 0.25)->value(x, 0.5) == doctest::Approx(0.8).epsilon(1e-10));

  boost::math::quadrature::tanh_sinh<double> q;
  const auto k = [](double s) { return std::exp(-1.0 / (1.0 - s * s)); };
  const double m2 = q.integrate([&](double s) { return s * s * k(s); }, -1.0, 1.0) / q.integrate(k, -1.0, 1.0);
  CHECK(mollifier_second_moment() == doctest::Approx(m2).epsilon(1e-10));
  CHECK(mollify(X::coordinate(0, 2), 0.5)->value(x, 0.0) == doctest::Approx(0.09 + 0.25 * m2).epsilon(1e-9));

  const SpaceParams p(2, 0.5, 0.5);
  const X u = bump(p) * X::coordinate(0, 3) * X::boundary_power(1.5);
  const auto smooth = mollify(u, 0.1);
  const auto dsmooth = mollify(differentiate(u, {1, 0}), 0.1);
  const double h = 1e-4;
  const std::vector<double> lo{0.3 - h, 0.2}, hi{0.3 + h, 0.2};
  CHECK((smooth->value(hi, 0.0) - smooth->value(lo, 0.0)) / (2 * h) ==
        doctest::Approx(dsmooth->value(x, 0.0)).epsilon(1e-6));
}

TEST_CASE("mollified fields keep the weighted vanishing property") {
  const SpaceParams p(2, 0.5, 0.5);
  const auto src = EvaluatorSource(mollify(bump(p) * X::coordinate(0, 2) * X::boundary_power(1.0), 0.1));
  const auto f = src.derivative({1, 0}, 0, p.n());
  double prev = 1e300;
  for (double xn : {0.1, 0.01, 0.001}) {
    const std::vector<double> x{0.2, xn};
    const double v = std::fabs(f->value(x, 0.0));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("derivative envelope at the logarithmic order") {
  CHECK(derivative_envelope(1, std::exp(-1.0), SpaceParams(2, 1.0, 0.25)) == doctest::Approx(2.0));
}

TEST_CASE("gauge reference values") {
  const SpaceParams p(2, 0.5, 0.5);
  const double b_ref = 1.0 / (1.5 * 0.5);
  const auto g = gauge_tilde(5.0 * X::boundary_power(1.5), p);
  CHECK(g.a == doctest::Approx(15.0 / 4.0).epsilon(1e-10));
  CHECK(g.b == doctest::Approx(b_ref));

  const auto z = gauge_tilde(X::boundary_power(2.0), p);
  CHECK(std::fabs(z.a) < 1e-8);
  CHECK(std::fabs(at(z.qtilde, {0.0, 0.5})) < 1e-8);

  const auto s = gauge_tilde(X::boundary_power(1.5) + X::boundary_power(2.0), p);
  CHECK(s.a == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("full gauge") {
  const SpaceParams p(2, 0.5, 0.5);
  const X u = X::boundary_power(1.5) + X::coordinate(0);
  const auto g = gauge_full(u, p);
  const std::vector<double> e{0.0, 1.0};
  for (int k = 0; k <= 1; ++k)
    for (const auto& alpha : multi_indices(2, k)) CHECK(std::fabs(at(differentiate(u - g.q, alpha), e)) < 1e-10);

  const auto again = gauge_full(g.q, p);
  for (double xn : {0.01, 0.3, 1.2}) {
    const std::vector<double> x{0.4, xn};
    CHECK(std::fabs(again.q.evaluate(x) - g.q.evaluate(x)) < 1e-9);
  }

  // x_N^{n-j} D^alpha Q constant for j <= n, |alpha| = m - j, alpha_N < m - n
  for (const auto& alpha : multi_indices(2, 2)) {
    if (alpha.normal() >= p.m_minus_n()) continue;
    const X w = pre_weight(differentiate(g.q, alpha), p.n());
    const double ref = at(w, {0.0, 0.5});
    for (double xn : {0.01, 0.2, 0.9}) CHECK(std::fabs(at(w, {0.7, xn}) - ref) < 1e-10);
  }

  const X tb = X::time_power(1) * bump(p, 2.0, 4.0);
  CHECK(gauge_full(tb, p).time_coefficient == doctest::Approx(at(bump(p, 2.0, 4.0), {0.0, 1.0})));
}

TEST_CASE("traces") {
  const SpaceParams p(2, 0.5, 0.5);
  const X g = X::coordinate(0, 2) + X::constant(1.0);
  const auto t1 = trace(X::boundary_power(1.0) * g, 1, {{0.5}, {1.0}}, 0.0, p);
  CHECK(t1[0] == doctest::Approx(1.25));
  CHECK(t1[1] == doctest::Approx(2.0));
  CHECK(trace(bump(p) * X::boundary_power(1.5), 0, {{0.2}}, 0.0, p)[0] == 0.0);

  const SpaceParams q(2, 1.0, 0.25);
  const auto v = BoundaryFunction::windowed_gaussian(0.5, 1.5, 2.5);
  const auto w = poisson_extend(v, q);
  const std::vector<std::vector<double>> pts{{0.0}, {0.4}, {1.0}};
  const auto tr = trace(w, 0, pts, 0.0, q);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ref = v(pts[i], 0.0);
    CHECK(std::fabs(tr[i] - ref) <= 1e-4 * std::fabs(ref));
  }
}

TEST_CASE("Poisson kernel mass and cosine modes") {
  const SpaceParams p(2, 1.0, 0.25);
  const auto plate = poisson_extend(BoundaryFunction::plateau(3.0, 1.0, 2.0), p);
  const std::vector<double> x{0.1, 1e-7};
  CHECK(std::fabs(plate->value(x, 0.0) - 3.0) < 3e-6);
  const auto w = poisson_extend(BoundaryFunction::windowed_cosine(2.0, 40.0, 60.0), p);
  for (double x1 : {-1.0, 0.0, 0.6})
    for (double xn : {0.1, 0.5}) {
      const std::vector<double> y{x1, xn};
      const double ref = std::cos(2.0 * x1) * std::exp(-2.0 * xn);
      CHECK(std::fabs(w->value(y, 0.0) - ref) <= 1e-4 * std::fabs(ref));
    }
}

TEST_CASE("boundary distance") {
  const std::vector<double> x{0.2, 0.3};
  CHECK(domain_distance(DomainGeometry::half_space(), x).d == doctest::Approx(0.3));
  const auto disk = DomainGeometry::make_disk({0.0, 0.0}, 1.0);
  const std::vector<double> edge{0.6, 0.8}, inner{0.0, 0.9};
  CHECK(std::fabs(domain_distance(disk, edge).d) < 1e-15);
  const double d = domain_distance(disk, inner).d;
  CHECK(d == doctest::Approx(0.095));
  CHECK(d / 0.1 >= 0.5);
  CHECK(d / 0.1 <= 2.0);
  const std::vector<double> out{0.0, 1.5};
  CHECK_THROWS_AS(domain_distance(disk, out), DomainError);
}

TEST_CASE("estimates never decrease on larger or finer windows") {
  const X f = bump(SpaceParams(2, 0.5, 0.5)) * X::boundary_power(0.4) * X::coordinate(0);
  SeminormSpec s;
  s.weight_power = 0.3;
  const Window w = window(6, 5);
  const double base = weighted_seminorm(f, s, w).value;
  CHECK(weighted_seminorm(f, s, w.refined()).value >= base);
  CHECK(weighted_seminorm(f, s, w.scaled(2.0)).value >= base);
}
