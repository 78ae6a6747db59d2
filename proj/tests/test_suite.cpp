#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wholder/error.hpp"
#include "wholder/suite.hpp"

using namespace wholder;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wholder_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = SuiteConfig::from_json({{"checks", {"embedding", {{"id", "cc-metric"}, {"params", {{"m", 2}, {"n", 0.5}, {"gamma", 0.5}}}}}},
                                         {"tolerances", {{"atol", 1e-9}}},
                                         {"threads", 2}});
  CHECK(c.checks.size() == 2);
  CHECK(c.growth.atol == 1e-9);
  CHECK(c.threads == 2);
  CHECK(expand(c).size() == 4);
  CHECK(SuiteConfig::from_json(c.to_json()).to_json() == c.to_json());
  CHECK_THROWS_AS(SuiteConfig::from_json({{"checks", {"nope"}}}), UnknownCheckError);
  CHECK_THROWS_AS(SuiteConfig::from_json({{"tolerances", {{"atol", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(SuiteConfig::from_json({{"threads", 0}}), ConfigError);
  CHECK_THROWS_AS(SuiteConfig::from_json(nlohmann::json::array()), ConfigError);
  CHECK_THROWS_AS(SuiteConfig::load(std::string(WHOLDER_TEST_DATA) + "/unknown_id.json"), UnknownCheckError);
}

TEST_CASE("empty suite passes") {
  SuiteConfig c;
  c.output = scratch_dir("empty");
  const auto out = run_suite(c);
  CHECK(out.exit_code == kExitPass);
  CHECK(out.summary.at("checks").empty());
  CHECK(fs::exists(c.output / "summary.json"));
}

TEST_CASE("exit codes from summaries") {
  auto s = [](std::vector<std::string> v) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& x : v) rows.push_back({{"verdict", x}});
    return nlohmann::json{{"checks", rows}};
  };
  CHECK(exit_code_from_summary(s({"pass", "pass"})) == kExitPass);
  CHECK(exit_code_from_summary(s({"pass", "fail"})) == kExitFail);
  CHECK(exit_code_from_summary(s({"fail", "config-error"})) == kExitConfig);
  CHECK(exit_code_from_summary(s({"config-error", "error"})) == kExitInfrastructure);
}

TEST_CASE("plot data") {
  const nlohmann::json r = {{"trails",
                             {{{"scale", 1.0}, {"term", "G1, a"}, {"value", 0.5}, {"slope", 0.25}},
                              {{"scale", 2.0}, {"term", "b"}, {"value", "inf"}, {"slope", nullptr}}}}};
  CHECK(emit_plot_data(r) == "scale,term,value,slope\n1,\"G1, a\",0.5,0.25\n2,b,inf,\n");
  CHECK_THROWS_AS(emit_plot_data({{"x", 1}}), ConfigError);
  CHECK_THROWS_AS(emit_plot_data({{"trails", {{{"scale", 1.0}}}}}), ConfigError);
}

TEST_CASE("suite reports do not depend on the thread budget") {
  auto run = [](unsigned threads) {
    SuiteConfig c = SuiteConfig::from_json({{"checks", {{{"id", "cc-metric"}, {"params", {{"m", 2}, {"n", 1.0}, {"gamma", 0.25}}}}}}});
    c.threads = threads;
    c.output = scratch_dir("threads" + std::to_string(threads));
    const auto out = run_suite(c);
    CHECK(out.exit_code == kExitPass);
    return c.output;
  };
  const auto a = run(1), b = run(4);
  for (const auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  const std::string csv = slurp(a / "cc-metric_m2_n1_g0.25.csv");
  CHECK(csv.rfind("scale,term,value,slope\n", 0) == 0);
}
