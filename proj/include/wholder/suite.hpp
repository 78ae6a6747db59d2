#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wholder/checks.hpp"

namespace wholder {

/// Process exit codes of the suite runner.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitInfrastructure = 3 };

/// One suite entry: a check id plus overrides on its default case.
/// Without "params" the check runs on each of its default parameter sets.
struct SuiteEntry {
  std::string id;
  std::optional<SpaceParams> params;
  nlohmann::json overrides = nlohmann::json::object();  // window, ladder, options, family, expectation
};

struct SuiteConfig {
  std::vector<SuiteEntry> checks;
  nlohmann::json window = nlohmann::json::object();  // applied to every case before entry overrides
  GrowthOptions growth;
  std::filesystem::path output = "reports";
  unsigned threads = 1;

  /// Throws ConfigError (or UnknownCheckError) on malformed input, unknown ids or nonpositive tolerances.
  void validate() const;
  static SuiteConfig from_json(const nlohmann::json& j);
  static SuiteConfig load(const std::filesystem::path& path);
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Concrete cases of a config in run order.
std::vector<CheckCase> expand(const SuiteConfig& cfg);

struct SuiteOutcome {
  std::vector<VerificationReport> reports;
  nlohmann::json summary;
  int exit_code = kExitPass;
};

/// Runs every case, writing one report JSON and one trail CSV per case plus summary.json.
SuiteOutcome run_suite(const SuiteConfig& cfg);

/// Exit status from a summary document alone.
int exit_code_from_summary(const nlohmann::json& summary);

/// CSV with header scale,term,value,slope; one row per trail point. Throws ConfigError on a malformed report.
std::string emit_plot_data(const nlohmann::json& report);

/// File stem for a case, e.g. "counterexample_m2_n0.5_g0.5".
std::string report_stem(const std::string& id, const SpaceParams& p);

/// Deterministic text of a report.
std::string dump_report(const VerificationReport& r);

}  // namespace wholder
