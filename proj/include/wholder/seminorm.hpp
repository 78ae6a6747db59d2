#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wholder/field.hpp"
#include "wholder/window.hpp"

namespace wholder {

enum class PairKind { Isotropic, Directional, Tangential, Time };
enum class WeightConvention { Max, Min };
/// Below keeps |h| <= eps x_N, Above keeps |h| >= eps x_N (x_N of the base point).
enum class EpsRestriction { None, Below, Above };

struct SeminormSpec {
  PairKind kind = PairKind::Isotropic;
  int axis = 0;            // directional axis, 0-based; dim-1 is x_N
  double exponent = 0.5;
  double weight_power = 0.0;
  WeightConvention convention = WeightConvention::Max;
  double pre_weight = 0.0;  // x_N^p multiplied in before differencing
  int order = 1;            // difference order k
  EpsRestriction restriction = EpsRestriction::None;
  double eps = 0.0;

  void validate() const;
  [[nodiscard]] std::string label() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static SeminormSpec from_json(const nlohmann::json& j);
};

enum class Growth { Zero, Bounded, Diverging };

struct Classification {
  Growth kind = Growth::Zero;
  double slope = 0.0;
  [[nodiscard]] std::string name() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct Witness {
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;
  double s = 0.0;  // second time
  double step = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct TrailPoint {
  double scale = 1.0;
  int levels = 0;
  double value = 0.0;
};

struct SeminormEstimate {
  double value = 0.0;
  Witness witness;
  std::vector<TrailPoint> trail;
  std::optional<Classification> classification;

  [[nodiscard]] bool finite() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Number of worker threads used by the pair loops; results do not depend on it.
void set_thread_budget(unsigned threads);
[[nodiscard]] unsigned thread_budget();

/// JSON number, or the string "inf"/"nan" for non-finite values.
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

double cc_distance(std::span<const double> x, std::span<const double> y, double omega);

/// First-difference seminorm over the window's pair set (isotropic, directional or tangential).
SeminormEstimate weighted_seminorm(const Field& f, const SeminormSpec& spec, const Window& w);
SeminormEstimate weighted_seminorm(const Expression& f, const SeminormSpec& spec, const Window& w);

/// sup weight(base) |Delta_h^k f| / |h|^exponent with the whole stencil inside the window.
SeminormEstimate kth_difference_seminorm(const Field& f, const SeminormSpec& spec, const Window& w);
SeminormEstimate kth_difference_seminorm(const Expression& f, const SeminormSpec& spec, const Window& w);

/// sup x_N^{weight_power} |Delta_tau^k f| / tau^beta over same-x time pairs.
SeminormEstimate time_seminorm(const Field& f, double beta, double weight_power, const Window& w, int order = 1);
SeminormEstimate time_seminorm(const Expression& f, double beta, double pre_weight, const Window& w);

enum class ZygmundVariant { Tangential, Time };
/// sup |Delta^2_{theta,x_N} Delta_h f| / (theta h^exponent).
SeminormEstimate zygmund_seminorm(const Field& f, const Window& w, ZygmundVariant variant, double exponent);
SeminormEstimate zygmund_seminorm(const Expression& f, const Window& w, ZygmundVariant variant, double exponent);

/// Epsilon-restricted isotropic seminorm with base-point weight, plus local axis steps theta eps x_N.
SeminormEstimate eps_restricted_seminorm(const Field& f, double exponent, double weight_power, double eps,
                                         EpsRestriction mode, const Window& w);

/// sup |f(x) - f(y)| / s(x, y)^gamma over isotropic pairs.
SeminormEstimate cc_seminorm(const Field& f, double gamma, double omega, const Window& w);

SeminormEstimate sup_norm(const Field& f, const Window& w);
SeminormEstimate sup_norm(const Expression& f, const Window& w);

/// Dispatch on spec.kind and spec.order; pre_weight applied symbolically for expressions.
SeminormEstimate estimate(const Expression& f, const SeminormSpec& spec, const Window& w);
SeminormEstimate estimate(const FieldSource& src, const MultiIndex& alpha, int time_order, const SeminormSpec& spec,
                          const Window& w);

/// Isotropic weighted seminorm over a point cloud; weight uses the cloud distance.
SeminormEstimate cloud_seminorm(const Field& f, const PointCloud& c, double exponent, double weight_power,
                                WeightConvention conv = WeightConvention::Max);
SeminormEstimate cloud_time_seminorm(const Field& f, const PointCloud& c, double beta);
SeminormEstimate cloud_sup(const Field& f, const PointCloud& c);

struct GrowthOptions {
  double atol = 1e-10;
  double slope_threshold = 0.1;
};

/// Least-squares slope of log value against log scale.
double fit_slope(const std::vector<double>& scales, const std::vector<double>& values);
Classification classify_growth(const std::vector<TrailPoint>& trail, const GrowthOptions& opt = {});

/// Evaluates est on every rung of the ladder and classifies the trail. The returned value is the last rung's.
SeminormEstimate run_ladder(const std::function<SeminormEstimate(const Window&)>& est, const Window& base,
                            const Ladder& ladder, const GrowthOptions& opt = {});

}  // namespace wholder
