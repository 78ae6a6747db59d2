#include <fmt/format.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wholder/checks.hpp"
#include "wholder/operators.hpp"
#include "wholder/suite.hpp"

using namespace wholder;
namespace fs = std::filesystem;
using X = Expression;

namespace {

struct Run {
  std::vector<VerificationReport> reports;
  double seconds = 0.0;
  std::string error;
};

Run run_all(const std::string& id, const std::vector<SpaceParams>& sets) {
  Run r;
  const auto start = std::chrono::steady_clock::now();
  try {
    for (const auto& p : sets) r.reports.push_back(run_check(default_case(id, p)));
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<SpaceParams> sets_of(const std::string& id) {
  for (const auto& c : list_cases())
    if (c.id == id) return c.params;
  return {};
}

/// Measured values of every assertion whose name contains `key`.
std::vector<double> measured(const Run& r, const std::string& key) {
  std::vector<double> out;
  for (const auto& rep : r.reports)
    for (const auto& a : rep.assertions)
      if (a.name.find(key) != std::string::npos) out.push_back(a.measured);
  return out;
}

bool all_of(const std::vector<double>& v, const std::function<bool(double)>& f) {
  if (v.empty()) return false;
  for (double x : v)
    if (!f(x)) return false;
  return true;
}

bool verdicts(const Run& r) {
  if (!r.error.empty() || r.reports.empty()) return false;
  for (const auto& rep : r.reports)
    if (!rep.verdict) return false;
  return true;
}

double worst(const std::vector<double>& v) {
  double w = 0.0;
  for (double x : v) w = std::max(w, std::fabs(x));
  return v.empty() ? std::nan("") : w;
}

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
  failures += pass ? 0 : 1;
  std::cout << fmt::format("AC{:<2} {}  {}\n", n, pass ? "PASS" : "FAIL", detail) << std::flush;
}

std::string with_error(const Run& r, std::string s) { return r.error.empty() ? s : s + "; error: " + r.error; }

void ac1() {
  const SpaceParams p(2, 0.5, 0.5);
  const Run r = run_all("counterexample", {p});
  const double expected = 2.0 - p.gamma() + p.omega() * p.gamma();
  const auto rhs = measured(r, "RHS");
  std::vector<double> direct;
  for (const auto& rep : r.reports)
    for (const auto& a : rep.assertions)
      if (a.name.ends_with("mixed term slope")) direct.push_back(a.measured);
  const bool ok = verdicts(r) && all_of(direct, [&](double s) { return std::fabs(s - expected) <= 0.15; }) &&
                  all_of(rhs, [](double v) { return v < 1e-10; }) && r.seconds < 60.0;
  report(1, ok,
         with_error(r, fmt::format("mixed slope {:.4f} (expected {:.4f} +- 0.15), max RHS {:.2e}, {:.1f}s",
                                   direct.empty() ? std::nan("") : direct.front(), expected, worst(rhs), r.seconds)));
}

void ac2() {
  const Run r = run_all("main-estimate", default_param_sets());
  const auto slopes = measured(r, " slope");
  const auto changes = measured(r, "ratio change over the finest rungs");
  const bool ok = verdicts(r) && r.reports.size() == 3 && all_of(slopes, [](double s) { return s < 0.1; }) &&
                  all_of(changes, [](double c) { return c <= 0.2; }) && r.seconds < 600.0;
  std::size_t members = 0;
  for (const auto& rep : r.reports) members = std::max(members, rep.members.size());
  report(2, ok,
         with_error(r, fmt::format("{} sets x {} members, max group slope {:.4f}, max ratio change {:.3f}, {:.1f}s",
                                   r.reports.size(), members, worst(slopes), worst(changes), r.seconds)));
}

void ac3() {
  const Run r = run_all("k-difference", default_param_sets());
  const auto changes = measured(r, "change under refinement");
  std::vector<double> rs;
  for (const auto& rep : r.reports)
    for (const auto& a : rep.assertions)
      if (a.name.ends_with(": ratio") || a.name.ends_with(": refined ratio")) rs.push_back(a.measured);
  const bool ok = verdicts(r) && all_of(rs, [](double v) { return v >= 1e-2 && v <= 1e2; }) &&
                  all_of(changes, [](double c) { return c < 0.1; });
  double lo = 1e300, hi = 0.0;
  for (double v : rs) lo = std::min(lo, v), hi = std::max(hi, v);
  report(3, ok, with_error(r, fmt::format("ratios in [{:.3g}, {:.3g}], max refinement change {:.4f}", lo, hi,
                                          worst(changes))));
}

void ac4() {
  double err_power = 0.0, err_log = 0.0;
  bool ok = true;
  std::string msg;
  try {
    for (const auto& p : default_param_sets()) {
      for (double c : {-3.0, 1.0, 5.0}) {
        const double mn = p.m_minus_n();
        const X u = p.integer_n() ? c * X::iterated_log(static_cast<int>(std::lround(mn)))
                                  : c * X::boundary_power(mn);
        const auto g = gauge_tilde(u, p);
        if (!p.integer_n()) {
          // a = c Gamma(m-n+1)/Gamma(1-n), b = Gamma(1-n)/Gamma(m-n+1)
          const double a = c * std::tgamma(mn + 1.0) / std::tgamma(1.0 - p.n());
          const double b = std::tgamma(1.0 - p.n()) / std::tgamma(mn + 1.0);
          err_power = std::max({err_power, std::fabs(g.a - a) / std::fabs(a), std::fabs(g.b - b) / std::fabs(b)});
        }
        for (double xn : {1e-3, 0.01, 0.1, 0.5, 0.9})
          for (double x1 : {-0.5, 0.0, 0.7}) {
            const std::vector<double> x{x1, xn};
            const double e = std::fabs(g.qtilde.evaluate(x) - u.evaluate(x)) / std::fabs(u.evaluate(x));
            (p.integer_n() ? err_log : err_power) = std::max(p.integer_n() ? err_log : err_power, e);
          }
      }
    }
  } catch (const std::exception& ex) {
    ok = false;
    msg = std::string("; error: ") + ex.what();
  }
  ok = ok && err_power < 1e-10 && err_log < 1e-8;
  report(4, ok, fmt::format("power branch rel error {:.2e} (< 1e-10), log branch {:.2e} (< 1e-8){}", err_power,
                            err_log, msg));
}

void ac5() {
  boost::math::quadrature::tanh_sinh<double> q;
  double err = 0.0;
  for (int k = 0; k <= 4; ++k)
    for (double x : {0.1, 0.5, 1.0, 2.0}) {
      double ref = std::log(x);
      if (k > 0) {
        double fact = 1.0;
        for (int i = 2; i < k; ++i) fact *= i;
        ref = q.integrate([&](double s) { return std::pow(x - s, k - 1) / fact * std::log(s); }, 0.0, x);
      }
      err = std::max(err, std::fabs(iterated_log(k, x) - ref) / std::max(1.0, std::fabs(ref)));
    }
  report(5, err <= 1e-10, fmt::format("max deviation from quadrature {:.2e} over k <= 4, x in {{0.1, 0.5, 1, 2}}", err));
}

void ac6() {
  const Run r = run_all("trace-extension", {SpaceParams(2, 1.0, 0.25)});
  const auto repro = measured(r, "boundary reproduction");
  const auto decay = measured(r, "exponential decay match");
  const auto dev = measured(r, "decay exponent deviation");
  const bool ok = verdicts(r) && all_of(repro, [](double v) { return v < 1e-4; }) &&
                  all_of(decay, [](double v) { return v < 1e-3; }) && all_of(dev, [](double v) { return v <= 0.1; }) &&
                  r.seconds < 300.0;
  report(6, ok,
         with_error(r, fmt::format("reproduction {:.2e}, cosine decay {:.2e}, exponent deviation {:.3f}, {:.1f}s",
                                   worst(repro), worst(decay), worst(dev), r.seconds)));
}

void ac7() {
  std::vector<SpaceParams> sets;
  for (const auto& p : default_param_sets())
    if (p.integer_n()) sets.push_back(p);
  const Run r = run_all("lower-order", sets);
  const auto van = measured(r, ": vanishing member, normal seminorm slope");
  const auto non = measured(r, "non-vanishing member, normal seminorm slope");
  const auto zyg = measured(r, "zygmund slope");
  const bool ok = verdicts(r) && all_of(van, [](double s) { return s < 0.1; }) &&
                  all_of(non, [](double s) { return s > 0.1; }) && all_of(zyg, [](double s) { return s < 0.1; });
  double nmin = 1e300;
  for (double s : non) nmin = std::min(nmin, s);
  report(7, ok, with_error(r, fmt::format("vanishing slope <= {:.4f}, non-vanishing slope >= {:.4f}, zygmund <= {:.4f}",
                                          worst(van), nmin, worst(zyg))));
}

void ac8() {
  const Run r = run_all("interpolation", default_param_sets());
  const auto consts = measured(r, "single constant");
  const auto dev = measured(r, "exponent deviation");
  const bool ok = verdicts(r) && all_of(consts, [](double c) { return std::isfinite(c); }) &&
                  all_of(dev, [](double d) { return d <= 0.1; });
  report(8, ok, with_error(r, fmt::format("largest constant {:.3g}, max exponent deviation {:.4f}", worst(consts),
                                          worst(dev))));
}

void ac9() {
  const Run r = run_all("small-time", default_param_sets());
  bool ok = verdicts(r);
  double margin = 1e300;
  std::size_t n = 0;
  for (const auto& rep : r.reports)
    for (const auto& a : rep.assertions)
      if (a.name.ends_with("T-slope")) {
        ++n;
        margin = std::min(margin, a.measured - a.bound);
        ok = ok && a.measured >= a.bound;
      }
  ok = ok && n > 0;
  report(9, ok, with_error(r, fmt::format("{} T-slopes, smallest margin over exponent - 0.05: {:.4f}", n, margin)));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void ac10() {
  const nlohmann::json checks = {{{"id", "counterexample"}, {"params", SpaceParams(2, 0.5, 0.5).to_json()}},
                                 {{"id", "lower-order"}, {"params", SpaceParams(2, 1.0, 0.25).to_json()}},
                                 {{"id", "main-estimate"}, {"params", SpaceParams(2, 0.5, 0.5).to_json()}}};
  std::vector<fs::path> dirs;
  std::string msg;
  bool ok = true;
  try {
    for (unsigned t : {1u, 8u}) {
      SuiteConfig c = SuiteConfig::from_json({{"checks", checks}});
      c.threads = t;
      c.output = fs::temp_directory_path() / fmt::format("wholder_acceptance_t{}", t);
      fs::remove_all(c.output);
      run_suite(c);
      dirs.push_back(c.output);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      ++files;
      const fs::path other = dirs[1] / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        ok = false;
        msg += " differs: " + e.path().filename().string();
      }
    }
    msg = fmt::format("{} files compared", files) + msg;
    ok = ok && files >= 7;
  } catch (const std::exception& ex) {
    ok = false;
    msg = std::string("error: ") + ex.what();
  }
  set_thread_budget(1);
  report(10, ok, "threads 1 vs 8: " + msg);
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  ac7();
  ac8();
  ac9();
  ac10();
  std::cout << fmt::format("{} of 10 criteria pass\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
