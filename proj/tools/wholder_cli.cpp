#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "wholder/error.hpp"
#include "wholder/suite.hpp"

using namespace wholder;

namespace {

int cmd_run(const std::string& config, std::optional<unsigned> threads, std::optional<std::string> out,
            std::optional<double> atol, std::optional<double> slope) {
  SuiteConfig cfg;
  try {
    cfg = SuiteConfig::load(config);
    if (threads) cfg.threads = *threads;
    if (out) cfg.output = *out;
    if (atol) cfg.growth.atol = *atol;
    if (slope) cfg.growth.slope_threshold = *slope;
    cfg.validate();
    expand(cfg);
  } catch (const Error& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  }
  try {
    const auto outcome = run_suite(cfg);
    std::size_t pass = 0;
    for (const auto& row : outcome.summary.at("checks")) pass += row.at("verdict") == "pass" ? 1 : 0;
    std::cout << fmt::format("{}/{} cases pass; reports in {}\n", pass, outcome.summary.at("checks").size(),
                             cfg.output.string());
    return outcome.exit_code;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInfrastructure;
  }
}

int cmd_list(bool as_json) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : list_cases()) {
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : c.params) ps.push_back(p.to_json());
    j.push_back({{"id", c.id}, {"summary", c.summary}, {"expectation", expectation_name(c.expectation)}, {"params", ps}});
    if (!as_json) {
      std::string sets;
      for (const auto& p : c.params) sets += (sets.empty() ? "" : " ") + p.str();
      std::cout << fmt::format("{:<16} {}\n{:<16} expectation {}; params {}\n", c.id, c.summary, "",
                               expectation_name(c.expectation), sets);
    }
  }
  if (as_json) std::cout << j.dump(2) << "\n";
  return kExitPass;
}

int cmd_plot(const std::string& report, const std::string& csv) {
  try {
    std::ifstream f(report);
    if (!f) throw ConfigError("cannot read report " + report);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("report is not valid JSON: ") + ex.what());
    }
    const std::string text = emit_plot_data(j);
    if (csv == "-") {
      std::cout << text;
    } else {
      std::ofstream o(csv, std::ios::binary);
      if (!o) throw Error("cannot write " + csv);
      o << text;
    }
    return kExitPass;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInfrastructure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Hoelder space verification suite"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the checks of a suite config");
  std::string config;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<double> atol, slope;
  run->add_option("config", config, "suite config JSON")->required();
  run->add_option("--threads", threads, "thread budget")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "output directory");
  run->add_option("--atol", atol, "zero tolerance");
  run->add_option("--slope-threshold", slope, "bounded/diverging slope threshold");

  auto* list = app.add_subcommand("list", "list registered checks");
  bool as_json = false;
  list->add_flag("--json", as_json, "print JSON");

  auto* plot = app.add_subcommand("plot", "write the ladder trails of a report as CSV");
  std::string report, csv = "-";
  plot->add_option("report", report, "report JSON")->required();
  plot->add_option("-o,--output", csv, "CSV path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  if (*run) return cmd_run(config, threads, out, atol, slope);
  if (*list) return cmd_list(as_json);
  return cmd_plot(report, csv);
}
