#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "wholder/error.hpp"
#include "wholder/expression.hpp"
#include "wholder/operators.hpp"
#include "wholder/params.hpp"

using namespace wholder;
using X = Expression;

namespace {

// L_k(x) = int_0^x (x - s)^{k-1} / (k-1)! ln s ds
double iterated_log_quadrature(int k, double x) {
  if (k == 0) return std::log(x);
  double fact = 1.0;
  for (int i = 2; i < k; ++i) fact *= i;
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([&](double s) { return std::pow(x - s, k - 1) / fact * std::log(s); }, 0.0, x);
}

double at(const Expression& e, std::vector<double> x, double t = 0.0) { return e.evaluate(x, t); }

}  // namespace

TEST_CASE("space parameters") {
  SpaceParams p(2, 0.5, 0.5);
  CHECK(p.omega() == doctest::Approx(0.25));
  CHECK_FALSE(p.integer_n());
  CHECK(SpaceParams(4, 1.0, 0.25).integer_n());
  CHECK(p.m_minus_n() == doctest::Approx(1.5));
  CHECK_THROWS_AS(SpaceParams(0, 0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(SpaceParams(2, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(SpaceParams(2, 2.5, 0.5), ConfigError);
  CHECK(SpaceParams::from_json(p.to_json()) == p);
  CHECK(default_param_sets().size() == 3);
}

TEST_CASE("multi-index enumeration") {
  CHECK(multi_indices(2, 3).size() == 4);
  CHECK(multi_indices(3, 2).size() == 6);
  for (const auto& a : multi_indices(3, 4)) CHECK(a.order() == 4);
  CHECK(tangential_multi_indices(3, 2).size() == 3);
  CHECK(MultiIndex({2, 1}).factorial() == doctest::Approx(2.0));
}

TEST_CASE("iterated log closed form against quadrature") {
  for (int k = 0; k <= 4; ++k)
    for (double x : {0.1, 0.5, 1.0, 2.0}) {
      const double ref = iterated_log_quadrature(k, x);
      CHECK(std::fabs(iterated_log_value(k, x) - ref) <= 1e-10 * std::max(1.0, std::fabs(ref)));
      CHECK(iterated_log(k, x) == doctest::Approx(iterated_log_value(k, x)).epsilon(1e-14));
    }
  CHECK(iterated_log_value(3, 0.0) == 0.0);
  CHECK_THROWS_AS(iterated_log_value(0, 0.0), DomainError);
  CHECK_THROWS_AS(iterated_log_value(1, -1.0), DomainError);
}

TEST_CASE("iterated log derivative steps down one level") {
  const X l3 = X::iterated_log(3);
  const X d = differentiate(l3, {0, 1});
  for (double x : {0.05, 0.3, 1.7}) CHECK(at(d, {0.2, x}) == doctest::Approx(iterated_log_value(2, x)).epsilon(1e-12));
}

TEST_CASE("Leibniz rule matches finite differences") {
  const SpaceParams p(2, 0.5, 0.5);
  CutoffSpec s;
  s.center = {0.0, 0.0};
  s.order = 4;
  const X u = make_cutoff(s, p) * X::coordinate(0, 2) * X::boundary_power(1.5) + X::time_power(2) * X::coordinate(0);
  for (const auto& alpha : {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}, MultiIndex{2, 0}})
    CHECK(fd_consistency(u, alpha, 1e-4) < 1e-5);
  const X ut = differentiate(u, {0, 0}, 1);
  CHECK(at(ut, {0.3, 0.4}, 2.0) == doctest::Approx(4.0 * 0.3));
}

TEST_CASE("boundary powers combine and vanish where expected") {
  const X e = X::boundary_power(0.5) * X::boundary_power(1.5);
  CHECK(at(e, {0.1, 0.3}) == doctest::Approx(0.09));
  CHECK(at(X::boundary_power(2.0), {0.0, 0.0}) == 0.0);
  CHECK_FALSE(std::isfinite(at(X::boundary_power(-0.5), {0.0, 0.0})));
  CHECK(differentiate(X::constant(3.0), {1, 0}).is_zero());
}

TEST_CASE("expression JSON round trip") {
  const SpaceParams p(4, 1.0, 0.25);
  CutoffSpec s;
  s.center = {0.0, 0.0};
  s.order = 6;
  const X u = make_cutoff(s, p) * (X::coordinate(0, 3) + 2.0 * X::iterated_log(3)) - X::time_power(1);
  const X v = X::from_json(u.to_json());
  for (double xn : {0.01, 0.2, 0.7})
    for (double t : {0.0, 0.5}) CHECK(at(v, {0.3, xn}, t) == doctest::Approx(at(u, {0.3, xn}, t)).epsilon(1e-15));
  CHECK(v.to_json() == u.to_json());
}

TEST_CASE("cutoff construction is checked") {
  const SpaceParams p(2, 0.5, 0.5);
  CutoffSpec s;
  s.center = {0.0, 0.0};
  s.order = 1;
  CHECK_THROWS_AS(make_cutoff(s, p), ConfigError);
  s.order = 3;
  s.r_inner = 1.0;
  s.r_outer = 0.5;
  CHECK_THROWS_AS(make_cutoff(s, p), ConfigError);
  s.r_inner = 0.5;
  s.r_outer = 1.0;
  const X c = make_cutoff(s, p);
  CHECK(at(c, {0.1, 0.1}) == 1.0);
  CHECK(at(c, {0.9, 0.9}) == 0.0);
  const double mid = at(c, {0.0, 0.75});
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("axis rescaling") {
  const X u = X::coordinate(0, 2) * X::boundary_power(1.5);
  const X r = rescale_axis(u, 1, 2, 4.0);
  CHECK(at(r, {0.5, 0.25}) == doctest::Approx(at(u, {0.5, 1.0})));
  const X r0 = rescale_axis(u, 0, 2, 2.0);
  CHECK(at(r0, {0.5, 0.25}) == doctest::Approx(at(u, {1.0, 0.25})));
}
