#include "checks_common.hpp"

#include <cmath>
#include <limits>

#include "wholder/error.hpp"

namespace wholder {

namespace {

constexpr int kSchemaVersion = 1;

const char* const kExpectationNames[] = {"ratio-bounded", "lhs-diverges-rhs-zero", "iff-split", "slope-at-least",
                                         "two-sided"};

}  // namespace

std::string expectation_name(Expectation e) { return kExpectationNames[static_cast<int>(e)]; }

Expectation expectation_from_name(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == kExpectationNames[i]) return static_cast<Expectation>(i);
  throw ConfigError("unknown expectation: " + s);
}

nlohmann::json Member::to_json() const {
  nlohmann::json j = {{"name", name}, {"u", u.to_json()}};
  if (!note.empty()) j["note"] = note;
  if (dim != 0) j["dim"] = dim;
  if (!boundary.is_null()) j["boundary"] = boundary;
  return j;
}

Member Member::from_json(const nlohmann::json& j) {
  Member m;
  m.name = j.value("name", std::string("member"));
  if (j.contains("u")) m.u = Expression::from_json(j.at("u"));
  m.note = j.value("note", std::string());
  m.dim = j.value("dim", std::size_t{0});
  if (j.contains("boundary")) m.boundary = j.at("boundary");
  return m;
}

void CheckCase::validate() const {
  if (id.empty()) throw ConfigError("check case without id");
  if (family.empty()) throw ConfigError("check case '" + id + "' has an empty family");
  window.validate();
  if (!(growth.atol > 0.0) || !(growth.slope_threshold > 0.0)) throw ConfigError("tolerances must be positive");
}

nlohmann::json CheckCase::to_json() const {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& m : family) f.push_back(m.to_json());
  return {{"id", id},
          {"params", params.to_json()},
          {"family", f},
          {"window", window.to_json()},
          {"ladder", ladder.to_json()},
          {"expectation", expectation_name(expectation)},
          {"growth", {{"atol", growth.atol}, {"slope_threshold", growth.slope_threshold}}},
          {"options", options}};
}

CheckCase CheckCase::from_json(const nlohmann::json& j, const CheckCase& base) {
  CheckCase c = base;
  if (j.contains("id")) c.id = j.at("id").get<std::string>();
  if (j.contains("params")) c.params = SpaceParams::from_json(j.at("params"));
  if (j.contains("family")) {
    c.family.clear();
    for (const auto& m : j.at("family")) c.family.push_back(Member::from_json(m));
  }
  if (j.contains("window")) c.window = Window::from_json(j.at("window"), base.window);
  if (j.contains("ladder")) c.ladder = Ladder::from_json(j.at("ladder"));
  if (j.contains("expectation")) c.expectation = expectation_from_name(j.at("expectation").get<std::string>());
  if (j.contains("growth")) {
    c.growth.atol = j.at("growth").value("atol", c.growth.atol);
    c.growth.slope_threshold = j.at("growth").value("slope_threshold", c.growth.slope_threshold);
  }
  if (j.contains("options"))
    for (const auto& [k, v] : j.at("options").items()) c.options[k] = v;
  return c;
}

CheckCase CheckCase::from_json(const nlohmann::json& j) { return from_json(j, CheckCase{}); }

Assertion Assertion::make(std::string name, double measured, std::string op, double bound) {
  Assertion a{std::move(name), measured, std::move(op), bound, false};
  a.pass = a.evaluate();
  return a;
}

bool Assertion::evaluate() const {
  if (std::isnan(measured) || std::isnan(bound)) return false;
  if (op == "<") return measured < bound;
  if (op == "<=") return measured <= bound;
  if (op == ">") return measured > bound;
  if (op == ">=") return measured >= bound;
  throw ConfigError("unknown comparison: " + op);
}

nlohmann::json Assertion::to_json() const {
  return {{"name", name}, {"measured", json_number(measured)}, {"op", op}, {"bound", json_number(bound)},
          {"pass", pass}};
}

Assertion Assertion::from_json(const nlohmann::json& j) {
  Assertion a;
  a.name = j.at("name").get<std::string>();
  a.measured = number_from_json(j.at("measured"));
  a.op = j.at("op").get<std::string>();
  a.bound = number_from_json(j.at("bound"));
  a.pass = j.value("pass", false);
  return a;
}

void VerificationReport::finalize() {
  verdict = true;
  for (const auto& a : assertions) verdict = verdict && a.pass;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : assertions) a.push_back(x.to_json());
  nlohmann::json t = nlohmann::json::array();
  for (const auto& r : trails) {
    nlohmann::json row = {{"scale", json_number(r.scale)}, {"term", r.term}, {"value", json_number(r.value)}};
    row["slope"] = r.slope ? json_number(*r.slope) : nlohmann::json(nullptr);
    if (!r.reason.empty()) row["reason"] = r.reason;
    t.push_back(row);
  }
  return {{"schema_version", kSchemaVersion},
          {"id", id},
          {"params", params.to_json()},
          {"expectation", expectation_name(expectation)},
          {"verdict", verdict ? "pass" : "fail"},
          {"constant", json_number(constant)},
          {"assertions", a},
          {"members", members},
          {"observations", observations},
          {"notes", notes},
          {"trails", t}};
}

VerificationReport VerificationReport::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw ConfigError("malformed report");
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw ConfigError("unsupported report schema version");
  VerificationReport r;
  r.id = j.at("id").get<std::string>();
  r.params = SpaceParams::from_json(j.at("params"));
  r.expectation = expectation_from_name(j.at("expectation").get<std::string>());
  r.verdict = j.at("verdict").get<std::string>() == "pass";
  r.constant = number_from_json(j.at("constant"));
  for (const auto& a : j.at("assertions")) r.assertions.push_back(Assertion::from_json(a));
  r.members = j.value("members", nlohmann::json::array());
  r.observations = j.value("observations", nlohmann::json::object());
  r.notes = j.value("notes", std::vector<std::string>{});
  for (const auto& row : j.at("trails")) {
    TrailRow t;
    t.scale = number_from_json(row.at("scale"));
    t.term = row.at("term").get<std::string>();
    t.value = number_from_json(row.at("value"));
    if (!row.at("slope").is_null()) t.slope = number_from_json(row.at("slope"));
    t.reason = row.value("reason", std::string());
    r.trails.push_back(std::move(t));
  }
  return r;
}

bool recompute_verdict(const nlohmann::json& report) {
  bool ok = true;
  for (const auto& a : report.at("assertions")) ok = ok && Assertion::from_json(a).evaluate();
  return ok;
}

namespace detail {

Expression bump(std::size_t dim, const SpaceParams& p, double r_in, double r_out) {
  CutoffSpec s;
  s.center.assign(dim, 0.0);
  s.r_inner = r_in;
  s.r_outer = r_out;
  s.order = p.m() + 2;
  return make_cutoff(s, p);
}

Window window_for(const Window& base, std::size_t dim) {
  if (dim == 0 || dim == base.dim()) return base;
  Window w = base;
  const double hw = base.tangent_half_width.empty() ? 1.0 : base.tangent_half_width.front();
  w.tangent_half_width.assign(dim - 1, hw);
  return w;
}

std::size_t member_dim(const Member& m, const Window& base) { return m.dim == 0 ? base.dim() : m.dim; }

void Recorder::check(const std::string& name, double measured, const std::string& op, double bound) {
  r_.assertions.push_back(Assertion::make(name, measured, op, bound));
}

void Recorder::trail(const std::string& term, const std::vector<TrailPoint>& t,
                     const std::optional<Classification>& c) {
  for (const auto& p : t) {
    TrailRow row{p.scale, term, p.value, std::nullopt, {}};
    if (c) row.slope = c->slope;
    else row.reason = "fewer than 3 rungs";
    r_.trails.push_back(std::move(row));
  }
}

std::optional<Classification> Recorder::trail(const std::string& term, const std::vector<double>& scales,
                                              const std::vector<double>& values) {
  std::vector<TrailPoint> t;
  for (std::size_t i = 0; i < scales.size(); ++i) t.push_back({scales[i], 0, values[i]});
  std::optional<Classification> c;
  if (t.size() >= 3) c = classify_growth(t, g_);
  trail(term, t, c);
  return c;
}

void Recorder::ratio(double v) {
  if (std::isnan(v)) return;
  if (v > r_.constant) r_.constant = v;
}

double rel_change(double a, double b) {
  if (a == b) return 0.0;
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return std::fabs(a - b) / std::fabs(b);
}

double safe_ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 0.0;
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return a / b;
}

bool is_zero(double v, const GrowthOptions& g) { return std::fabs(v) < g.atol; }

VerificationReport start_report(const CheckCase& c) {
  VerificationReport r;
  r.id = c.id;
  r.params = c.params;
  r.expectation = c.expectation;
  return r;
}

}  // namespace detail

}  // namespace wholder
