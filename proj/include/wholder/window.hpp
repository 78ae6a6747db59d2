#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "wholder/field.hpp"

namespace wholder {

/// Truncated half-space region with geometric grading toward x_N = 0.
struct Window {
  std::vector<double> tangent_half_width{1.0};  // R' per tangential axis
  double boundary_extent = 1.0;                 // R_N
  double time_extent = 1.0;                     // T
  double grading = 0.7;                         // rho
  int levels = 24;                              // L
  int tangent_points = 17;                      // P' per axis
  int time_points = 9;                          // P_t on [0, T]
  int normal_uniform = 0;                       // extra x_N samples R_N i / k, 1 <= i < k
  bool include_boundary = true;
  std::size_t point_cap = std::size_t{1} << 20;
  std::size_t pair_cap = std::size_t{1} << 24;

  [[nodiscard]] std::size_t dim() const { return tangent_half_width.size() + 1; }
  /// {R_N rho^j : 0 <= j <= L} merged with the uniform samples, then 0 when the boundary is included;
  /// strictly decreasing.
  [[nodiscard]] std::vector<double> normal_samples() const;
  [[nodiscard]] std::vector<double> tangent_samples(std::size_t axis) const;
  [[nodiscard]] std::vector<double> time_samples() const;
  [[nodiscard]] std::size_t point_count() const;
  void validate() const;

  /// Window-ladder rung: extents times s at constant spacing, finest x_N level kept.
  [[nodiscard]] Window scaled(double s) const;
  /// Depth-ladder rung: finest x_N level divided by s.
  [[nodiscard]] Window deepened(double s) const;
  /// One grid refinement: rho -> sqrt(rho), L -> 2L, P' -> 2P'-1, P_t -> 2P_t-1.
  [[nodiscard]] Window refined() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static Window from_json(const nlohmann::json& j, const Window& defaults);
  static Window from_json(const nlohmann::json& j);
};

struct Ladder {
  enum class Kind { Window, Depth };
  Kind kind = Kind::Window;
  std::vector<double> scales{1.0, 2.0, 4.0};

  [[nodiscard]] Window rung(const Window& base, double s) const;
  [[nodiscard]] nlohmann::json to_json() const;
  static Ladder from_json(const nlohmann::json& j);
};

/// Tensor grid of a window. Space index = tangential_flat * normal.size() + level.
class Grid {
 public:
  explicit Grid(const Window& w);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const std::vector<double>& normal() const { return normal_; }
  [[nodiscard]] const std::vector<double>& tangent(std::size_t axis) const { return tangent_[axis]; }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] std::size_t tangent_count() const { return tangent_count_; }
  [[nodiscard]] std::size_t space_size() const { return tangent_count_ * normal_.size(); }
  [[nodiscard]] double spacing(std::size_t axis) const { return spacing_[axis]; }
  /// Per-axis tangential indices of a flat tangential index.
  [[nodiscard]] std::vector<int> unflatten(std::size_t flat) const;
  [[nodiscard]] std::size_t flatten(const std::vector<int>& idx) const;
  [[nodiscard]] std::vector<double> point(std::size_t space) const;
  /// Number of levels counted as boundary-adjacent for pair stratification.
  [[nodiscard]] bool boundary_adjacent(std::size_t level) const;

  /// Values at every (time, space) point; a single slice when the field ignores t.
  struct Values {
    std::vector<double> v;  // slice-major
    std::size_t slices = 1;
    std::vector<double> slice_times;
  };
  [[nodiscard]] Values sample(const Field& f) const;

 private:
  std::size_t dim_;
  std::vector<std::vector<double>> tangent_;
  std::vector<double> spacing_;
  std::vector<double> normal_;
  std::vector<double> times_;
  std::size_t tangent_count_;
};

/// Unstructured sample set with a boundary distance per point (disk windows).
struct PointCloud {
  std::size_t dim = 2;
  std::vector<double> coords;  // dim per point
  std::vector<double> dist;
  std::vector<int> stratum;  // distance level; 0 is closest to the boundary
  std::vector<double> times;

  [[nodiscard]] std::size_t size() const { return dist.size(); }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }
  struct Values {
    std::vector<double> v;
    std::size_t slices = 1;
    std::vector<double> slice_times;
  };
  [[nodiscard]] Values sample(const Field& f) const;
};

/// Disk sample set: distance levels d_max rho^j (j <= L), uniform angles, uniform times on [0, T].
struct DiskWindow {
  DomainGeometry geometry = DomainGeometry::make_disk({0.0, 1.5}, 1.0);
  double grading = 0.7;
  int levels = 24;
  int angles = 48;
  int time_points = 9;
  double time_extent = 1.0;
  bool include_boundary = false;

  [[nodiscard]] PointCloud cloud() const;
  [[nodiscard]] DiskWindow deepened(double s) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

}  // namespace wholder
