#include "wholder/suite.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wholder/error.hpp"

namespace wholder {

namespace {

constexpr int kSummaryVersion = 1;

const char* const kOverrideKeys[] = {"window", "ladder", "options", "family", "expectation", "growth"};

std::string number_text(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
  if (!f) throw Error("failed writing " + p.string());
}

}  // namespace

void SuiteConfig::validate() const {
  const auto known = list_cases();
  for (const auto& e : checks) {
    bool found = false;
    for (const auto& k : known) found = found || k.id == e.id;
    if (!found) throw UnknownCheckError("unknown check id: " + e.id);
    if (!e.overrides.is_object()) throw ConfigError("overrides of '" + e.id + "' must be an object");
  }
  if (!(growth.atol > 0.0) || !(growth.slope_threshold > 0.0)) throw ConfigError("tolerances must be positive");
  if (threads == 0) throw ConfigError("thread budget must be positive");
  if (!window.is_object()) throw ConfigError("window defaults must be an object");
}

SuiteConfig SuiteConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("suite config must be a JSON object");
  SuiteConfig c;
  try {
    for (const auto& e : j.value("checks", nlohmann::json::array())) {
      SuiteEntry s;
      if (e.is_string()) {
        s.id = e.get<std::string>();
      } else {
        s.id = e.at("id").get<std::string>();
        if (e.contains("params")) s.params = SpaceParams::from_json(e.at("params"));
        for (const char* k : kOverrideKeys)
          if (e.contains(k)) s.overrides[k] = e.at(k);
      }
      c.checks.push_back(std::move(s));
    }
    c.window = j.value("window", nlohmann::json::object());
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.growth.atol = t.value("atol", c.growth.atol);
      c.growth.slope_threshold = t.value("slope_threshold", c.growth.slope_threshold);
    }
    c.output = j.value("output", std::string("reports"));
    c.threads = j.value("threads", 1u);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed suite config: ") + ex.what());
  }
  c.validate();
  return c;
}

SuiteConfig SuiteConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  return from_json(j);
}

nlohmann::json SuiteConfig::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& e : checks) {
    nlohmann::json x = e.overrides;
    x["id"] = e.id;
    if (e.params) x["params"] = e.params->to_json();
    cs.push_back(x);
  }
  return {{"checks", cs},
          {"window", window},
          {"tolerances", {{"atol", growth.atol}, {"slope_threshold", growth.slope_threshold}}},
          {"output", output.string()},
          {"threads", threads}};
}

std::vector<CheckCase> expand(const SuiteConfig& cfg) {
  std::vector<CheckCase> out;
  const auto known = list_cases();
  for (const auto& e : cfg.checks) {
    std::vector<SpaceParams> sets;
    if (e.params) sets.push_back(*e.params);
    else
      for (const auto& k : known)
        if (k.id == e.id) sets = k.params;
    for (const auto& p : sets) {
      CheckCase c = default_case(e.id, p);
      c.growth = cfg.growth;
      if (!cfg.window.empty()) c.window = Window::from_json(cfg.window, c.window);
      nlohmann::json o = e.overrides;
      if (o.contains("growth")) {
        nlohmann::json g = {{"atol", cfg.growth.atol}, {"slope_threshold", cfg.growth.slope_threshold}};
        for (const auto& [k, v] : o.at("growth").items()) g[k] = v;
        o["growth"] = g;
      }
      c = CheckCase::from_json(o, c);
      c.validate();
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string report_stem(const std::string& id, const SpaceParams& p) {
  return fmt::format("{}_m{}_n{}_g{}", id, p.m(), p.n(), p.gamma());
}

std::string dump_report(const VerificationReport& r) { return r.to_json().dump(2) + "\n"; }

int exit_code_from_summary(const nlohmann::json& summary) {
  int code = kExitPass;
  for (const auto& row : summary.at("checks")) {
    const auto v = row.at("verdict").get<std::string>();
    if (v == "error") code = kExitInfrastructure;
    else if (v == "config-error") code = std::max<int>(code, kExitConfig);
    else if (v != "pass") code = std::max<int>(code, kExitFail);
  }
  return code;
}

SuiteOutcome run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  set_thread_budget(cfg.threads);
  const auto cases = expand(cfg);
  std::filesystem::create_directories(cfg.output);
  SuiteOutcome out;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : cases) {
    const std::string stem = report_stem(c.id, c.params);
    nlohmann::json row = {{"id", c.id}, {"params", c.params.to_json()}};
    try {
      VerificationReport r = run_check(c);
      const nlohmann::json j = r.to_json();
      write_file(cfg.output / (stem + ".json"), dump_report(r));
      write_file(cfg.output / (stem + ".csv"), emit_plot_data(j));
      row["verdict"] = r.verdict ? "pass" : "fail";
      row["constant"] = json_number(r.constant);
      row["assertions"] = r.assertions.size();
      std::size_t failed = 0;
      for (const auto& a : r.assertions) failed += a.pass ? 0 : 1;
      row["failed"] = failed;
      row["report"] = stem + ".json";
      std::cerr << fmt::format("{:<16} {:<26} {}  ({:.1f}s)\n", c.id, c.params.str(), r.verdict ? "pass" : "FAIL",
                               r.runtime);
      out.reports.push_back(std::move(r));
    } catch (const ConfigError& ex) {
      row["verdict"] = "config-error";
      row["error"] = ex.what();
      std::cerr << fmt::format("{:<16} {:<26} config error: {}\n", c.id, c.params.str(), ex.what());
    } catch (const std::exception& ex) {
      row["verdict"] = "error";
      row["error"] = ex.what();
      std::cerr << fmt::format("{:<16} {:<26} error: {}\n", c.id, c.params.str(), ex.what());
    }
    rows.push_back(row);
  }
  out.summary = {{"schema_version", kSummaryVersion}, {"checks", rows}};
  out.exit_code = exit_code_from_summary(out.summary);
  out.summary["exit_code"] = out.exit_code;
  write_file(cfg.output / "summary.json", out.summary.dump(2) + "\n");
  return out;
}

std::string emit_plot_data(const nlohmann::json& report) {
  if (!report.is_object() || !report.contains("trails") || !report.at("trails").is_array())
    throw ConfigError("malformed report: no trails");
  std::ostringstream s;
  s << "scale,term,value,slope\n";
  try {
    for (const auto& row : report.at("trails")) {
      s << number_text(number_from_json(row.at("scale"))) << ',' << csv_field(row.at("term").get<std::string>()) << ','
        << number_text(number_from_json(row.at("value"))) << ',';
      if (!row.at("slope").is_null()) s << number_text(number_from_json(row.at("slope")));
      s << '\n';
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed report: ") + ex.what());
  }
  return s.str();
}

}  // namespace wholder
