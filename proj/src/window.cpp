#include "wholder/window.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "wholder/error.hpp"

namespace wholder {

namespace {

int extra_levels(double s, double rho) {
  if (s <= 1.0) return 0;
  return static_cast<int>(std::lround(std::log(s) / std::log(1.0 / rho)));
}

int scaled_points(int p, double s) {
  return static_cast<int>(std::lround((p - 1) * s)) + 1;
}

}  // namespace

std::vector<double> Window::normal_samples() const {
  std::vector<double> out;
  out.reserve(levels + normal_uniform + 2);
  double v = boundary_extent;
  for (int j = 0; j <= levels; ++j) {
    out.push_back(v);
    v *= grading;
  }
  if (normal_uniform > 1) {
    for (int i = 1; i < normal_uniform; ++i) out.push_back(boundary_extent * i / normal_uniform);
    std::sort(out.begin(), out.end(), std::greater<>());
    const double tol = 1e-9 * boundary_extent / normal_uniform;
    out.erase(std::unique(out.begin(), out.end(), [tol](double a, double b) { return a - b < tol; }), out.end());
  }
  if (include_boundary) out.push_back(0.0);
  return out;
}

std::vector<double> Window::tangent_samples(std::size_t axis) const {
  const double r = tangent_half_width.at(axis);
  std::vector<double> out(tangent_points);
  if (tangent_points == 1) {
    out[0] = 0.0;
    return out;
  }
  for (int i = 0; i < tangent_points; ++i) out[i] = -r + 2.0 * r * i / (tangent_points - 1);
  return out;
}

std::vector<double> Window::time_samples() const {
  std::vector<double> out(time_points);
  if (time_points == 1) {
    out[0] = 0.0;
    return out;
  }
  for (int i = 0; i < time_points; ++i) out[i] = time_extent * i / (time_points - 1);
  return out;
}

std::size_t Window::point_count() const {
  std::size_t n = normal_samples().size();
  for (std::size_t a = 0; a + 1 < dim(); ++a) n *= static_cast<std::size_t>(tangent_points);
  return n * static_cast<std::size_t>(time_points);
}

void Window::validate() const {
  for (double r : tangent_half_width)
    if (!(r > 0.0)) throw ConfigError("tangential half-width must be positive");
  if (!(boundary_extent > 0.0)) throw ConfigError("boundary extent must be positive");
  if (!(time_extent > 0.0)) throw ConfigError("time extent must be positive");
  if (!(grading > 0.0 && grading < 1.0)) throw ConfigError("grading ratio must lie in (0,1)");
  if (levels < 0) throw ConfigError("grading levels must be nonnegative");
  if (tangent_points < 1 || time_points < 1) throw ConfigError("point counts must be positive");
  if (normal_uniform < 0) throw ConfigError("uniform normal count must be nonnegative");
  if (point_count() > point_cap) throw ConfigError("window exceeds the point cap");
}

Window Window::scaled(double s) const {
  if (!(s > 0.0)) throw ConfigError("ladder scale must be positive");
  Window w = *this;
  for (double& r : w.tangent_half_width) r *= s;
  w.boundary_extent *= s;
  w.time_extent *= s;
  w.tangent_points = scaled_points(tangent_points, std::max(s, 1.0));
  w.time_points = time_points == 1 ? 1 : scaled_points(time_points, std::max(s, 1.0));
  w.normal_uniform = normal_uniform == 0 ? 0 : static_cast<int>(std::lround(normal_uniform * std::max(s, 1.0)));
  w.levels = levels + extra_levels(s, grading);
  return w;
}

Window Window::deepened(double s) const {
  if (!(s >= 1.0)) throw ConfigError("depth scale must be at least 1");
  Window w = *this;
  w.levels = levels + extra_levels(s, grading);
  return w;
}

Window Window::refined() const {
  Window w = *this;
  w.grading = std::sqrt(grading);
  w.levels = 2 * levels;
  w.tangent_points = 2 * tangent_points - 1;
  w.time_points = time_points == 1 ? 1 : 2 * time_points - 1;
  w.normal_uniform = 2 * normal_uniform;
  return w;
}

nlohmann::json Window::to_json() const {
  return {{"tangent_half_width", tangent_half_width},
          {"boundary_extent", boundary_extent},
          {"time_extent", time_extent},
          {"grading", grading},
          {"levels", levels},
          {"tangent_points", tangent_points},
          {"time_points", time_points},
          {"normal_uniform", normal_uniform},
          {"include_boundary", include_boundary},
          {"point_cap", point_cap},
          {"pair_cap", pair_cap}};
}

Window Window::from_json(const nlohmann::json& j, const Window& d) {
  if (!j.is_object()) throw ConfigError("window must be an object");
  Window w = d;
  try {
    if (j.contains("tangent_half_width")) {
      const auto& t = j.at("tangent_half_width");
      w.tangent_half_width = t.is_array() ? t.get<std::vector<double>>() : std::vector<double>{t.get<double>()};
    }
    w.boundary_extent = j.value("boundary_extent", d.boundary_extent);
    w.time_extent = j.value("time_extent", d.time_extent);
    w.grading = j.value("grading", d.grading);
    w.levels = j.value("levels", d.levels);
    w.tangent_points = j.value("tangent_points", d.tangent_points);
    w.time_points = j.value("time_points", d.time_points);
    w.normal_uniform = j.value("normal_uniform", d.normal_uniform);
    w.include_boundary = j.value("include_boundary", d.include_boundary);
    w.point_cap = j.value("point_cap", d.point_cap);
    w.pair_cap = j.value("pair_cap", d.pair_cap);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed window: ") + ex.what());
  }
  w.validate();
  return w;
}

Window Window::from_json(const nlohmann::json& j) { return from_json(j, Window{}); }

Window Ladder::rung(const Window& base, double s) const {
  return kind == Kind::Window ? base.scaled(s) : base.deepened(s);
}

nlohmann::json Ladder::to_json() const {
  return {{"kind", kind == Kind::Window ? "window" : "depth"}, {"scales", scales}};
}

Ladder Ladder::from_json(const nlohmann::json& j) {
  Ladder l;
  if (j.is_array()) {
    l.scales = j.get<std::vector<double>>();
    return l;
  }
  if (!j.is_object()) throw ConfigError("ladder must be an array or object");
  std::string k = j.value("kind", std::string("window"));
  if (k == "window") {
    l.kind = Kind::Window;
  } else if (k == "depth") {
    l.kind = Kind::Depth;
  } else {
    throw ConfigError("unknown ladder kind: " + k);
  }
  if (j.contains("scales")) l.scales = j.at("scales").get<std::vector<double>>();
  for (std::size_t i = 1; i < l.scales.size(); ++i)
    if (!(l.scales[i] > l.scales[i - 1])) throw ConfigError("ladder scales must increase");
  return l;
}

Grid::Grid(const Window& w) : dim_(w.dim()) {
  w.validate();
  tangent_count_ = 1;
  for (std::size_t a = 0; a + 1 < dim_; ++a) {
    tangent_.push_back(w.tangent_samples(a));
    spacing_.push_back(w.tangent_points > 1 ? 2.0 * w.tangent_half_width[a] / (w.tangent_points - 1) : 0.0);
    tangent_count_ *= tangent_.back().size();
  }
  normal_ = w.normal_samples();
  times_ = w.time_samples();
}

std::vector<int> Grid::unflatten(std::size_t flat) const {
  std::vector<int> idx(dim_ - 1);
  for (std::size_t a = dim_ - 1; a-- > 0;) {
    idx[a] = static_cast<int>(flat % tangent_[a].size());
    flat /= tangent_[a].size();
  }
  return idx;
}

std::size_t Grid::flatten(const std::vector<int>& idx) const {
  std::size_t f = 0;
  for (std::size_t a = 0; a + 1 < dim_; ++a) f = f * tangent_[a].size() + static_cast<std::size_t>(idx[a]);
  return f;
}

std::vector<double> Grid::point(std::size_t space) const {
  const std::size_t nl = normal_.size();
  std::vector<double> p(dim_);
  auto ti = unflatten(space / nl);
  for (std::size_t a = 0; a + 1 < dim_; ++a) p[a] = tangent_[a][ti[a]];
  p[dim_ - 1] = normal_[space % nl];
  return p;
}

bool Grid::boundary_adjacent(std::size_t level) const { return level + 3 >= normal_.size(); }

Grid::Values Grid::sample(const Field& f) const {
  Values out;
  out.slice_times = f.time_dependent() ? times_ : std::vector<double>{0.0};
  out.slices = out.slice_times.size();
  const std::size_t s = space_size();
  out.v.resize(out.slices * s);
  for (std::size_t i = 0; i < s; ++i) {
    auto p = point(i);
    for (std::size_t k = 0; k < out.slices; ++k) out.v[k * s + i] = f.value(p, out.slice_times[k]);
  }
  return out;
}

PointCloud::Values PointCloud::sample(const Field& f) const {
  Values out;
  out.slice_times = f.time_dependent() ? times : std::vector<double>{0.0};
  out.slices = out.slice_times.size();
  const std::size_t s = size();
  out.v.resize(out.slices * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t k = 0; k < out.slices; ++k) out.v[k * s + i] = f.value(point(i), out.slice_times[k]);
  return out;
}

PointCloud DiskWindow::cloud() const {
  if (!geometry.is_disk()) throw ConfigError("disk window requires disk geometry");
  if (geometry.disk.center.size() != 2) throw UnsupportedDimensionError("disk windows are two-dimensional");
  PointCloud c;
  c.dim = 2;
  const double r0 = geometry.disk.radius;
  const auto& ctr = geometry.disk.center;
  std::vector<double> ds;
  double d = r0 / 2.0;
  for (int j = 0; j <= levels; ++j) {
    ds.push_back(d);
    d *= grading;
  }
  if (include_boundary) ds.push_back(0.0);
  const int nl = static_cast<int>(ds.size());
  for (int j = 0; j < nl; ++j) {
    const double rr = std::sqrt(std::max(0.0, r0 * r0 - 2.0 * r0 * ds[j]));
    const int na = rr == 0.0 ? 1 : angles;
    for (int a = 0; a < na; ++a) {
      const double th = 2.0 * std::numbers::pi * a / na;
      c.coords.push_back(ctr[0] + rr * std::cos(th));
      c.coords.push_back(ctr[1] + rr * std::sin(th));
      c.dist.push_back(ds[j]);
      c.stratum.push_back(nl - 1 - j);
    }
  }
  c.times.resize(time_points);
  for (int i = 0; i < time_points; ++i)
    c.times[i] = time_points == 1 ? 0.0 : time_extent * i / (time_points - 1);
  return c;
}

DiskWindow DiskWindow::deepened(double s) const {
  DiskWindow w = *this;
  w.levels = levels + extra_levels(s, grading);
  return w;
}

nlohmann::json DiskWindow::to_json() const {
  return {{"center", geometry.disk.center},
          {"radius", geometry.disk.radius},
          {"grading", grading},
          {"levels", levels},
          {"angles", angles},
          {"time_points", time_points},
          {"time_extent", time_extent},
          {"include_boundary", include_boundary}};
}

}  // namespace wholder
