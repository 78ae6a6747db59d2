#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wholder/error.hpp"
#include "wholder/expression.hpp"
#include "wholder/operators.hpp"
#include "wholder/quadrature.hpp"

using namespace wholder;
using X = Expression;

namespace {

double poisson_reference(const BoundaryFunction& v, double x, double xn) {
  const auto kernel = [&](double y) {
    const double yy[1] = {y};
    const double d = x - y;
    return xn / std::numbers::pi / (d * d + xn * xn) * v(yy, 0.0);
  };
  double sum = 0.0;
  const double r = v.radius;
  const int pieces = 64;
  for (int i = 0; i < pieces; ++i) {
    const double a = -r + 2.0 * r * i / pieces, b = a + 2.0 * r / pieces;
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(kernel, a, b, 15, 1e-14);
  }
  return sum;
}

}  // namespace

TEST_CASE("gauge of a pure power recovers the function") {
  const SpaceParams p(2, 0.5, 0.5);
  for (double c : {-3.0, 1.0, 5.0}) {
    const X u = c * X::boundary_power(1.5);
    const auto g = gauge_tilde(u, p);
    CHECK(g.b == doctest::Approx(4.0 / 3.0));
    CHECK(g.a == doctest::Approx(0.75 * c).epsilon(1e-10));
    CHECK_FALSE(g.log_branch);
    for (double xn : {0.01, 0.1, 0.5}) {
      const std::vector<double> x{0.2, xn};
      CHECK(std::fabs(g.qtilde.evaluate(x) - u.evaluate(x)) <= 1e-10 * std::fabs(u.evaluate(x)));
    }
  }
}

TEST_CASE("gauge log branch") {
  const SpaceParams p(2, 1.0, 0.25);
  const X u = 3.0 * X::iterated_log(1) + X::coordinate(0, 2);
  const auto g = gauge_tilde(u, p);
  CHECK(g.log_branch);
  CHECK(g.a == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(g.b == doctest::Approx(1.0));
  const SpaceParams q(4, 1.0, 0.25);
  const auto h = gauge_tilde(2.0 * X::iterated_log(3), q);
  CHECK(h.a * h.b == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("gauge full leaves a residual flat at the reference point") {
  const SpaceParams p(2, 0.5, 0.5);
  const X u = 2.0 * X::boundary_power(1.5) + X::coordinate(0) * X::boundary_power(1.0) + X::constant(4.0) +
              X::time_power(1);
  const auto g = gauge_full(u, p);
  const X r = u - g.q;
  const std::vector<double> e{0.0, 1.0};
  for (int k = 0; k <= 1; ++k)
    for (const auto& alpha : multi_indices(2, k)) CHECK(std::fabs(differentiate(r, alpha).evaluate(e)) < 1e-9);
  CHECK(g.time_coefficient == doctest::Approx(1.0));
}

TEST_CASE("gauge limit fails for a divergent weighted derivative") {
  const SpaceParams p(2, 0.5, 0.5);
  CHECK_THROWS_AS(gauge_tilde(X::boundary_power(0.5), p), NoLimitError);
}

TEST_CASE("boundary limit and Wynn acceleration") {
  const auto r = boundary_limit([](double s) { return 2.0 + s + std::sqrt(s); });
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  std::vector<double> partial;
  double s = 0.0;
  for (int k = 1; k <= 12; ++k) {
    s += (k % 2 ? 1.0 : -1.0) / k;
    partial.push_back(s);
  }
  CHECK(wynn_epsilon(partial) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  LimitOptions bad;
  bad.ratio = 1.5;
  CHECK_THROWS_AS(boundary_limit([](double) { return 0.0; }, bad), ConfigError);
}

TEST_CASE("gauss rule integrates polynomials exactly") {
  CHECK(integrate([](double x) { return std::pow(x, 9); }, 0.0, 2.0) == doctest::Approx(102.4).epsilon(1e-13));
  const auto g = graded_rule(0.0, 1.0, true, false);
  CHECK(g.apply([](double x) { return 1.0 / std::sqrt(x); }) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("mollifier second moment") {
  const double m2 = mollifier_second_moment();
  CHECK(m2 > 0.0);
  CHECK(m2 < 1.0 / 3.0);
  const double eps = 0.1;
  const auto f = mollify(X::coordinate(0, 2), eps);
  const std::vector<double> x{0.0, 0.5};
  CHECK(f->value(x, 0.0) == doctest::Approx(eps * eps * m2).epsilon(1e-10));
  const auto lin = mollify(X::coordinate(0) + X::boundary_power(1.0), eps);
  const std::vector<double> y{0.3, 0.2};
  CHECK(lin->value(y, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(mollify(X::coordinate(0), 0.0), ConfigError);
}

TEST_CASE("derivative envelope") {
  const SpaceParams p(2, 0.5, 0.5);
  CHECK(derivative_envelope(0, 0.25, p) == doctest::Approx(2.0));
  CHECK(derivative_envelope(1, 0.25, p) == 1.0);
  const SpaceParams q(2, 1.0, 0.25);
  CHECK(derivative_envelope(1, 0.01, q) == doctest::Approx(1.0 + std::log(100.0)));
  CHECK_THROWS_AS(derivative_envelope(3, 0.1, p), ConfigError);
  CHECK_THROWS_AS(derivative_envelope(1, 0.0, p), DomainError);
}

TEST_CASE("trace of expressions") {
  const SpaceParams p(2, 0.5, 0.5);
  const X u = X::coordinate(0, 2) + X::coordinate(0) * X::boundary_power(1.0) + X::boundary_power(1.5);
  const auto v0 = trace(u, 0, {{0.5}, {-1.0}}, 0.0, p);
  CHECK(v0[0] == doctest::Approx(0.25));
  CHECK(v0[1] == doctest::Approx(1.0));
  const auto v1 = trace(u, 1, {{0.5}}, 0.0, p);
  CHECK(v1[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(trace(u, 2, {{0.5}}, 0.0, p), PreconditionError);
}

TEST_CASE("Poisson extension of a plateau") {
  const SpaceParams p(2, 1.0, 0.25);
  const auto w = poisson_extend(BoundaryFunction::plateau(2.0, 1.0, 2.0), p);
  const std::vector<double> x{0.0, 1e-3};
  CHECK(w->value(x, 0.0) == doctest::Approx(2.0).epsilon(1e-3));
  const auto tr = trace(w, 0, {{0.0}, {0.5}}, 0.0, p);
  CHECK(tr[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(tr[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Poisson extension against an independent quadrature") {
  const SpaceParams p(2, 1.0, 0.25);
  const auto v = BoundaryFunction::windowed_gaussian(0.5, 1.5, 2.5);
  const auto w = poisson_extend(v, p);
  for (double x : {0.0, 0.7, 2.0})
    for (double xn : {0.05, 0.3, 1.0}) {
      const std::vector<double> pt{x, xn};
      CHECK(w->value(pt, 0.0) == doctest::Approx(poisson_reference(v, x, xn)).epsilon(1e-8));
    }
}

TEST_CASE("Poisson extension is harmonic and damps cosines") {
  const SpaceParams p(2, 1.0, 0.25);
  const auto w = poisson_extend(BoundaryFunction::windowed_cosine(1.0, 40.0, 60.0), p);
  for (double xn : {0.1, 0.2, 0.4}) {
    const std::vector<double> x{0.3, xn};
    CHECK(w->value(x, 0.0) == doctest::Approx(std::cos(0.3) * std::exp(-xn)).epsilon(1e-3));
  }
  const double h = 1e-2;
  auto at = [&](double a, double b) {
    const std::vector<double> x{a, b};
    return w->harmonic(x, 0.0);
  };
  const double lap = (at(0.3 + h, 0.5) + at(0.3 - h, 0.5) + at(0.3, 0.5 + h) + at(0.3, 0.5 - h) - 4.0 * at(0.3, 0.5)) /
                     (h * h);
  CHECK(std::fabs(lap) < 1e-3);
}

TEST_CASE("Poisson extension preconditions") {
  const SpaceParams p(2, 1.0, 0.25);
  CutoffSpec c;
  c.center = {0.0, 0.0};
  c.r_inner = 1.0;
  c.r_outer = 3.0;
  c.order = 4;
  auto v = BoundaryFunction::plateau(1.0, 1.0, 2.0);
  CHECK_THROWS_AS(poisson_extend(v, p, c), PreconditionError);
  c.r_inner = 2.5;
  CHECK_NOTHROW(poisson_extend(v, p, c));
  v.tangent_dim = 3;
  CHECK_THROWS_AS(poisson_extend(v, p), UnsupportedDimensionError);
  CHECK_THROWS_AS(BoundaryFunction::from_json({{"kind", "nope"}}), ConfigError);
}

TEST_CASE("two tangent dimensions") {
  const SpaceParams p(2, 1.0, 0.25);
  const auto w = poisson_extend(BoundaryFunction::plateau(1.0, 1.0, 2.0, 2), p);
  const std::vector<double> x{0.1, -0.2, 1e-3};
  CHECK(w->value(x, 0.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("shifted monomial") {
  const X s = shifted_monomial({1, 2});
  const std::vector<double> x{0.5, 0.25};
  CHECK(s.evaluate(x) == doctest::Approx(0.5 * 0.75 * 0.75));
}
