#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wholder/checks.hpp"
#include "wholder/norms.hpp"

namespace wholder::detail {

/// Smooth radial cutoff centered at the origin, 1 on r_in and 0 beyond r_out.
Expression bump(std::size_t dim, const SpaceParams& p, double r_in = 0.5, double r_out = 1.0);

/// The base window reshaped to `dim` (tangential half-widths copied from the first axis).
Window window_for(const Window& base, std::size_t dim);
std::size_t member_dim(const Member& m, const Window& base);

/// Collects assertions, trail rows and notes into a report.
class Recorder {
 public:
  Recorder(VerificationReport& r, const GrowthOptions& g) : r_(r), g_(g) {}
  void check(const std::string& name, double measured, const std::string& op, double bound);
  void trail(const std::string& term, const std::vector<TrailPoint>& t, const std::optional<Classification>& c);
  /// Trail from (scale, value) pairs with the slope fitted here (classification needs 3 rungs).
  std::optional<Classification> trail(const std::string& term, const std::vector<double>& scales,
                                      const std::vector<double>& values);
  void note(const std::string& s) { r_.notes.push_back(s); }
  void ratio(double v);
  [[nodiscard]] const GrowthOptions& growth() const { return g_; }
  VerificationReport& report() { return r_; }

 private:
  VerificationReport& r_;
  GrowthOptions g_;
};

/// |a - b| / |b|, with 0 when both vanish.
double rel_change(double a, double b);
/// a / b with 0 / 0 = 0 and x / 0 = inf.
double safe_ratio(double a, double b);
bool is_zero(double v, const GrowthOptions& g);

VerificationReport check_embedding(const CheckCase& c);
VerificationReport check_kdiff_equivalence(const CheckCase& c);
VerificationReport check_minmax_weight(const CheckCase& c);
VerificationReport check_eps_restriction(const CheckCase& c);
VerificationReport check_cc_metric(const CheckCase& c);
VerificationReport check_main_estimate(const CheckCase& c);
VerificationReport check_counterexample(const CheckCase& c);
VerificationReport check_lower_order(const CheckCase& c);
VerificationReport check_general_domain(const CheckCase& c);
VerificationReport check_small_time(const CheckCase& c);
VerificationReport check_trace_extension(const CheckCase& c);
VerificationReport check_interpolation(const CheckCase& c);

VerificationReport start_report(const CheckCase& c);

}  // namespace wholder::detail
