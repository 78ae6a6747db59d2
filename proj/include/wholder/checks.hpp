#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wholder/expression.hpp"
#include "wholder/params.hpp"
#include "wholder/seminorm.hpp"
#include "wholder/window.hpp"

namespace wholder {

enum class Expectation { RatioBounded, LhsDivergesRhsZero, IffSplit, SlopeAtLeast, TwoSided };

std::string expectation_name(Expectation e);
Expectation expectation_from_name(const std::string& s);

/// One test function of a check family. `boundary` holds a boundary datum for the extension check.
struct Member {
  std::string name;
  Expression u;
  std::string note;
  std::size_t dim = 0;  // 0: the case window's dimension
  nlohmann::json boundary;

  [[nodiscard]] nlohmann::json to_json() const;
  static Member from_json(const nlohmann::json& j);
};

struct CheckCase {
  std::string id;
  SpaceParams params{2, 0.5, 0.5};
  std::vector<Member> family;
  Window window;
  Ladder ladder;
  Expectation expectation = Expectation::RatioBounded;
  GrowthOptions growth;
  nlohmann::json options = nlohmann::json::object();

  /// Throws ConfigError for an empty family, an invalid window or nonpositive tolerances.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  /// Fields absent from j keep the values of `base`.
  static CheckCase from_json(const nlohmann::json& j, const CheckCase& base);
  static CheckCase from_json(const nlohmann::json& j);
};

/// A recorded comparison; pass is recomputable from measured, op and bound.
struct Assertion {
  std::string name;
  double measured = 0.0;
  std::string op;  // "<", "<=", ">", ">="
  double bound = 0.0;
  bool pass = false;

  static Assertion make(std::string name, double measured, std::string op, double bound);
  [[nodiscard]] bool evaluate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static Assertion from_json(const nlohmann::json& j);
};

/// One ladder rung of one term, for plotting.
struct TrailRow {
  double scale = 0.0;
  std::string term;
  double value = 0.0;
  std::optional<double> slope;
  std::string reason;  // set when slope is absent
};

struct VerificationReport {
  std::string id;
  SpaceParams params{2, 0.5, 0.5};
  Expectation expectation = Expectation::RatioBounded;
  nlohmann::json members = nlohmann::json::array();
  std::vector<Assertion> assertions;
  std::vector<TrailRow> trails;
  std::vector<std::string> notes;
  nlohmann::json observations = nlohmann::json::object();  // recorded but not judged
  double constant = 0.0;                                   // largest measured ratio
  bool verdict = true;
  double runtime = 0.0;  // seconds; never serialized

  void finalize();  // verdict from assertions
  [[nodiscard]] nlohmann::json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);
};

/// Re-derives the verdict from the recorded assertions of a serialized report.
bool recompute_verdict(const nlohmann::json& report);

struct CheckInfo {
  std::string id;
  std::string summary;
  Expectation expectation;
  std::vector<SpaceParams> params;  // default parameter sets
};

std::vector<CheckInfo> list_cases();
/// Curated family, window and ladder for a check id.
CheckCase default_case(const std::string& id, const SpaceParams& p);
VerificationReport run_check(const CheckCase& c);

}  // namespace wholder
