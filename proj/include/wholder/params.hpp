#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace wholder {

/// Multi-index over (x_1, ..., x_N); the last entry is the boundary-normal order.
struct MultiIndex {
  std::vector<int> a;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : a(dim, 0) {}
  MultiIndex(std::initializer_list<int> v) : a(v) {}

  [[nodiscard]] std::size_t dim() const { return a.size(); }
  [[nodiscard]] int order() const;
  [[nodiscard]] int normal() const { return a.empty() ? 0 : a.back(); }
  [[nodiscard]] int operator[](std::size_t i) const { return a[i]; }
  int& operator[](std::size_t i) { return a[i]; }
  [[nodiscard]] double factorial() const;
  [[nodiscard]] std::string str() const;

  static MultiIndex unit(std::size_t dim, std::size_t axis, int k = 1);
  bool operator==(const MultiIndex&) const = default;
};

/// All multi-indices of dimension `dim` with |alpha| == order, in lexicographic order.
std::vector<MultiIndex> multi_indices(std::size_t dim, int order);

/// Multi-indices supported on the tangential axes only (alpha_N = 0).
std::vector<MultiIndex> tangential_multi_indices(std::size_t dim, int order);

/// The tuple (m, n, gamma) with omega = n / m.
class SpaceParams {
 public:
  SpaceParams(int m, double n, double gamma);

  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] double n() const { return n_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double omega() const { return n_ / m_; }
  [[nodiscard]] bool integer_n() const { return integer_n_; }
  /// floor(n) for integer comparisons like j <= n.
  [[nodiscard]] int n_floor() const;
  /// m - n as a real.
  [[nodiscard]] double m_minus_n() const { return m_ - n_; }

  [[nodiscard]] nlohmann::json to_json() const;
  static SpaceParams from_json(const nlohmann::json& j);
  [[nodiscard]] std::string str() const;

  bool operator==(const SpaceParams&) const = default;

 private:
  int m_;
  double n_;
  double gamma_;
  bool integer_n_;
};

/// The three built-in parameter sets.
std::vector<SpaceParams> default_param_sets();

/// Fractional part with snapping of near-integers to 0.
double frac_part(double v);
/// Integer part with the same snapping.
int int_part(double v);

}  // namespace wholder
