#include <cmath>
#include <vector>

#include "doctest.h"
#include "wholder/error.hpp"
#include "wholder/expression.hpp"
#include "wholder/seminorm.hpp"
#include "wholder/window.hpp"

using namespace wholder;
using X = Expression;

namespace {

Window small_window() {
  Window w;
  w.levels = 6;
  w.tangent_points = 5;
  w.time_points = 1;
  return w;
}

double brute_isotropic(const X& f, const Window& w, double exponent, double weight_power, bool use_max) {
  Grid g(w);
  double best = 0.0;
  for (std::size_t i = 0; i < g.space_size(); ++i)
    for (std::size_t j = i + 1; j < g.space_size(); ++j) {
      const auto x = g.point(i), y = g.point(j);
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
      const double base = use_max ? std::max(x.back(), y.back()) : std::min(x.back(), y.back());
      const double wt = weight_power == 0.0 ? 1.0 : std::pow(base, weight_power);
      best = std::max(best, wt * std::fabs(f.evaluate(x) - f.evaluate(y)) / std::pow(d2, 0.5 * exponent));
    }
  return best;
}

}  // namespace

TEST_CASE("window samples") {
  Window w = small_window();
  w.normal_uniform = 4;
  const auto n = w.normal_samples();
  for (std::size_t i = 1; i < n.size(); ++i) CHECK(n[i] < n[i - 1]);
  CHECK(n.back() == 0.0);
  CHECK(n.front() == doctest::Approx(1.0));
  CHECK(w.point_count() == n.size() * 5);
  const Window r = w.refined();
  CHECK(r.levels == 12);
  CHECK(r.tangent_points == 9);
  CHECK(r.grading == doctest::Approx(std::sqrt(0.7)));
  const Window s = w.scaled(2.0);
  CHECK(s.boundary_extent == doctest::Approx(2.0));
  CHECK(s.tangent_half_width[0] == doctest::Approx(2.0));
  const Window d = w.deepened(4.0);
  CHECK(d.normal_samples()[d.normal_samples().size() - 2] ==
        doctest::Approx(w.normal_samples()[w.normal_samples().size() - 2] / 4.0).epsilon(0.05));
  Window bad = w;
  bad.normal_uniform = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = w;
  bad.grading = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const Window back = Window::from_json(w.to_json());
  CHECK(back.to_json() == w.to_json());
}

TEST_CASE("linear function has unit Lipschitz seminorm") {
  const Window w = small_window();
  SeminormSpec s;
  s.exponent = 1.0;
  CHECK(weighted_seminorm(X::coordinate(0), s, w).value == doctest::Approx(1.0));
  CHECK(weighted_seminorm(X::boundary_power(1.0), s, w).value == doctest::Approx(1.0));
}

TEST_CASE("boundary power is exactly Hoelder with its own exponent") {
  const Window w = small_window();
  SeminormSpec s;
  s.exponent = 0.5;
  CHECK(weighted_seminorm(X::boundary_power(0.5), s, w).value == doctest::Approx(1.0));
}

TEST_CASE("isotropic seminorm against brute force") {
  const Window w = small_window();
  const X f = X::coordinate(0, 2) * X::boundary_power(0.7) + X::boundary_power(0.3);
  for (bool use_max : {true, false})
    for (double wp : {0.0, 0.5, 1.25}) {
      SeminormSpec s;
      s.exponent = 0.4;
      s.weight_power = wp;
      s.convention = use_max ? WeightConvention::Max : WeightConvention::Min;
      CHECK(weighted_seminorm(f, s, w).value == doctest::Approx(brute_isotropic(f, w, 0.4, wp, use_max)).epsilon(1e-12));
    }
}

TEST_CASE("max weight dominates min weight") {
  const Window w = small_window();
  const X f = X::boundary_power(0.3) * X::coordinate(0);
  SeminormSpec a;
  a.weight_power = 0.5;
  SeminormSpec b = a;
  b.convention = WeightConvention::Min;
  CHECK(weighted_seminorm(f, a, w).value >= weighted_seminorm(f, b, w).value);
}

TEST_CASE("thread budget does not change results") {
  Window w = small_window();
  w.levels = 10;
  w.tangent_points = 9;
  const X f = X::coordinate(0, 3) * X::boundary_power(1.2);
  SeminormSpec s;
  s.weight_power = 0.75;
  set_thread_budget(1);
  const auto a = weighted_seminorm(f, s, w);
  set_thread_budget(4);
  const auto b = weighted_seminorm(f, s, w);
  set_thread_budget(1);
  CHECK(a.value == b.value);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("slope fit is exact on power laws") {
  const std::vector<double> s{1, 2, 4, 8};
  std::vector<double> v;
  for (double x : s) v.push_back(3.0 * std::pow(x, 1.625));
  CHECK(fit_slope(s, v) == doctest::Approx(1.625).epsilon(1e-12));
}

TEST_CASE("growth classification") {
  auto trail = [](std::vector<double> v) {
    std::vector<TrailPoint> t;
    double s = 1.0;
    for (double x : v) {
      t.push_back({s, 0, x});
      s *= 2.0;
    }
    return t;
  };
  CHECK(classify_growth(trail({0, 0, 1e-14})).kind == Growth::Zero);
  CHECK(classify_growth(trail({1.0, 1.01, 1.02})).kind == Growth::Bounded);
  CHECK(classify_growth(trail({1.0, 2.0, 4.0})).kind == Growth::Diverging);
  CHECK(classify_growth(trail({1.0, 2.0, 4.0})).slope == doctest::Approx(1.0));
  CHECK_THROWS_AS(classify_growth(trail({1.0, 2.0})), TooFewRungsError);
}

TEST_CASE("non-finite values survive JSON") {
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(number_from_json("inf")));
  CHECK(std::isnan(number_from_json(json_number(std::nan("")))));
  CHECK(number_from_json(json_number(0.25)) == 0.25);
}

TEST_CASE("seminorm spec validation and round trip") {
  SeminormSpec s;
  s.kind = PairKind::Directional;
  s.axis = 1;
  s.exponent = 0.25;
  s.weight_power = 1.5;
  s.order = 2;
  CHECK(SeminormSpec::from_json(s.to_json()).to_json() == s.to_json());
  s.exponent = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("cc distance") {
  const std::vector<double> x{0.0, 0.0}, y{1.0, 0.0};
  CHECK(cc_distance(x, y, 0.5) == doctest::Approx(1.0));
  const std::vector<double> a{0.0, 1.0}, b{0.0, 1.0};
  CHECK(cc_distance(a, b, 0.5) == 0.0);
}
