#include <algorithm>
#include <string>

#include "doctest.h"
#include "wholder/checks.hpp"
#include "wholder/error.hpp"

using namespace wholder;
using X = Expression;

TEST_CASE("registry lists every check") {
  const auto cases = list_cases();
  CHECK(cases.size() >= 12);
  for (const char* id : {"embedding", "k-difference", "min-max-weight", "eps-restriction", "cc-metric", "main-estimate",
                         "counterexample", "lower-order", "general-domain", "small-time", "trace-extension",
                         "interpolation"}) {
    const bool found = std::any_of(cases.begin(), cases.end(), [&](const CheckInfo& c) { return c.id == id; });
    CHECK_MESSAGE(found, id);
  }
  for (const auto& c : cases) {
    CHECK_FALSE(c.params.empty());
    CHECK_NOTHROW(default_case(c.id, c.params.front()).validate());
  }
}

TEST_CASE("unknown ids and empty families are rejected") {
  CHECK_THROWS_AS(default_case("no-such-check", SpaceParams(2, 0.5, 0.5)), UnknownCheckError);
  CheckCase c = default_case("embedding", SpaceParams(2, 0.5, 0.5));
  c.family.clear();
  CHECK_THROWS_AS(run_check(c), ConfigError);
  c = default_case("embedding", SpaceParams(2, 0.5, 0.5));
  c.growth.atol = 0.0;
  CHECK_THROWS_AS(run_check(c), ConfigError);
}

TEST_CASE("slope checks need three rungs") {
  CheckCase c = default_case("counterexample", SpaceParams(2, 0.5, 0.5));
  c.ladder.scales = {1.0};
  CHECK_THROWS_AS(run_check(c), TooFewRungsError);
}

TEST_CASE("counterexample only applies to second order with n below one") {
  CheckCase c = default_case("counterexample", SpaceParams(2, 0.5, 0.5));
  c.params = SpaceParams(4, 1.0, 0.25);
  CHECK_THROWS_AS(run_check(c), PreconditionError);
}

TEST_CASE("small-time rejects members that do not vanish at t = 0") {
  CheckCase c = default_case("small-time", SpaceParams(2, 0.5, 0.5));
  c.family[0].u = X::time_power(1) * X::coordinate(0) + X::constant(1.0);
  CHECK_THROWS_AS(run_check(c), PreconditionError);
}

TEST_CASE("check case JSON round trip") {
  for (const auto& info : list_cases()) {
    const CheckCase c = default_case(info.id, info.params.front());
    const CheckCase back = CheckCase::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
  }
  CheckCase base = default_case("embedding", SpaceParams(2, 0.5, 0.5));
  const CheckCase o = CheckCase::from_json({{"window", {{"levels", 5}}}}, base);
  CHECK(o.window.levels == 5);
  CHECK(o.family.size() == base.family.size());
}

TEST_CASE("report verdict is recomputable and survives JSON") {
  const VerificationReport r = run_check(default_case("embedding", SpaceParams(2, 0.5, 0.5)));
  CHECK(r.verdict);
  CHECK_FALSE(r.assertions.empty());
  const auto j = r.to_json();
  CHECK_FALSE(j.contains("runtime"));
  CHECK(recompute_verdict(j) == r.verdict);
  const VerificationReport back = VerificationReport::from_json(j);
  CHECK(back.to_json() == j);

  auto tampered = j;
  tampered["assertions"][0]["measured"] = "nan";
  CHECK_FALSE(recompute_verdict(tampered));
}

TEST_CASE("assertions evaluate their comparison") {
  CHECK(Assertion::make("a", 1.0, "<", 2.0).pass);
  CHECK_FALSE(Assertion::make("a", 2.0, "<", 2.0).pass);
  CHECK(Assertion::make("a", 2.0, "<=", 2.0).pass);
  CHECK(Assertion::make("a", 3.0, ">=", 2.0).pass);
  CHECK_FALSE(Assertion::make("a", std::nan(""), "<", 2.0).pass);
}

TEST_CASE("sub-families of a passing family pass") {
  const CheckCase c = default_case("min-max-weight", SpaceParams(2, 1.0, 0.25));
  REQUIRE(run_check(c).verdict);
  for (const auto& m : c.family) {
    CheckCase one = c;
    one.family = {m};
    CHECK_MESSAGE(run_check(one).verdict, m.name);
  }
}

TEST_CASE("identically zero members pass vacuously") {
  CheckCase c = default_case("interpolation", SpaceParams(2, 0.5, 0.5));
  c.family = {c.family.front()};
  REQUIRE(c.family.front().u.is_zero());
  CHECK(run_check(c).verdict);
}

TEST_CASE("expectation names round trip") {
  for (auto e : {Expectation::RatioBounded, Expectation::LhsDivergesRhsZero, Expectation::IffSplit,
                 Expectation::SlopeAtLeast, Expectation::TwoSided})
    CHECK(expectation_from_name(expectation_name(e)) == e);
  CHECK_THROWS_AS(expectation_from_name("sometimes"), ConfigError);
}
