#include "canonical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "wholder/error.hpp"

namespace wholder {

namespace {

constexpr double kExpSnap = 1e-12;

double snap_exponent(double a) {
  double r = std::round(a);
  return std::abs(a - r) < kExpSnap ? r : a;
}

template <typename T>
int cmp3(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

int compare_spec(const CutoffSpec& a, const CutoffSpec& b) {
  if (int c = cmp3(a.center, b.center)) return c;
  if (int c = cmp3(a.weights, b.weights)) return c;
  if (int c = cmp3(a.t_center, b.t_center)) return c;
  if (int c = cmp3(a.t_weight, b.t_weight)) return c;
  if (int c = cmp3(a.r_inner, b.r_inner)) return c;
  if (int c = cmp3(a.r_outer, b.r_outer)) return c;
  return cmp3(a.order, b.order);
}

int compare_factor(const CutoffFactor& a, const CutoffFactor& b) {
  if (a.spec != b.spec) {
    if (int c = compare_spec(*a.spec, *b.spec)) return c;
  }
  return cmp3(a.derivative, b.derivative);
}

int compare_disk(const std::shared_ptr<const DiskSpec>& a, const std::shared_ptr<const DiskSpec>& b) {
  if (!a || !b) return cmp3(static_cast<bool>(a), static_cast<bool>(b));
  if (a == b) return 0;
  if (int c = cmp3(a->center, b->center)) return c;
  return cmp3(a->radius, b->radius);
}

void trim(std::vector<int>& mono) {
  while (!mono.empty() && mono.back() == 0) mono.pop_back();
}

void sort_factors(Monomial& m) {
  std::sort(m.logs.begin(), m.logs.end());
  std::sort(m.cutoffs.begin(), m.cutoffs.end(),
            [](const CutoffFactor& a, const CutoffFactor& b) { return compare_factor(a, b) < 0; });
}

double ipow(double x, int k) {
  double r = 1.0;
  double b = x;
  unsigned e = static_cast<unsigned>(k);
  while (e) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1u;
  }
  return r;
}

Term with_coeff(const Term& t, double c) {
  Term r = t;
  r.coeff = c;
  return r;
}

// Adds d/d(axis) of the factor (x_axis - c) * (multiplier) to out: multiplier*x_axis - multiplier*c.
void push_shifted(std::vector<Term>& out, Term base, double multiplier, double c, int axis,
                  std::size_t dim) {
  const bool normal = axis == static_cast<int>(dim) - 1;
  Term lin = base;
  lin.coeff *= multiplier;
  if (axis < 0) {
    lin.m.tpow += 1;
  } else if (normal) {
    lin.m.bpow = snap_exponent(lin.m.bpow + 1.0);
  } else {
    if (lin.m.mono.size() <= static_cast<std::size_t>(axis)) lin.m.mono.resize(axis + 1, 0);
    lin.m.mono[axis] += 1;
  }
  out.push_back(std::move(lin));
  if (c != 0.0) {
    Term cst = std::move(base);
    cst.coeff *= -multiplier * c;
    out.push_back(std::move(cst));
  }
}

}  // namespace

int compare(const Monomial& a, const Monomial& b) {
  if (int c = cmp3(a.mono, b.mono)) return c;
  if (int c = cmp3(a.bpow, b.bpow)) return c;
  if (int c = cmp3(a.logs, b.logs)) return c;
  if (int c = cmp3(a.tpow, b.tpow)) return c;
  if (int c = cmp3(a.cutoffs.size(), b.cutoffs.size())) return c;
  for (std::size_t i = 0; i < a.cutoffs.size(); ++i)
    if (int c = compare_factor(a.cutoffs[i], b.cutoffs[i])) return c;
  if (int c = compare_disk(a.disk, b.disk)) return c;
  return cmp3(a.dpow, b.dpow);
}

void Canonical::normalize() {
  for (auto& t : terms) {
    trim(t.m.mono);
    sort_factors(t.m);
    t.m.bpow = snap_exponent(t.m.bpow);
    t.m.dpow = snap_exponent(t.m.dpow);
    if (t.m.dpow == 0.0) t.m.disk.reset();
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return compare(a.m, b.m) < 0; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (auto& t : terms) {
    if (!merged.empty() && compare(merged.back().m, t.m) == 0) {
      double a = merged.back().coeff;
      double s = a + t.coeff;
      if (std::abs(s) <= 1e-14 * (std::abs(a) + std::abs(t.coeff))) s = 0.0;
      merged.back().coeff = s;
    } else {
      merged.push_back(std::move(t));
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.coeff == 0.0; }),
               merged.end());
  terms = std::move(merged);
}

bool Canonical::time_dependent() const {
  for (const auto& t : terms) {
    if (t.m.tpow > 0) return true;
    for (const auto& c : t.m.cutoffs)
      if (c.spec->t_weight != 0.0) return true;
  }
  return false;
}

double Canonical::evaluate(std::span<const double> x, double t) const {
  if (x.empty()) throw DomainError("evaluation point has no coordinates");
  const std::size_t dim = x.size();
  const double xn = x[dim - 1];
  if (xn < 0.0) throw DomainError("evaluation point has x_N < 0");
  const bool interior = xn > 0.0;
  const double lx = interior ? std::log(xn) : 0.0;
  double total = 0.0;
  bool blown = false;
  for (const auto& term : terms) {
    const Monomial& m = term.m;
    double v = term.coeff;
    for (std::size_t i = 0; i < m.mono.size(); ++i) {
      if (m.mono[i] == 0) continue;
      if (i + 1 >= dim) throw DomainError("coordinate axis exceeds point dimension");
      v *= ipow(x[i], m.mono[i]);
    }
    if (m.tpow) v *= ipow(t, m.tpow);
    for (const auto& cf : m.cutoffs) {
      v *= cf.spec->profile(cf.spec->radial(x, t), cf.derivative);
      if (v == 0.0) break;
    }
    if (v == 0.0) continue;
    bool singular = false;
    if (m.disk) {
      double d = m.disk->distance(x);
      if (d < 0.0) throw DomainError("evaluation point outside the disk");
      if (d > 0.0) {
        v *= std::exp(m.dpow * std::log(d));
      } else if (m.dpow > 0.0) {
        v = 0.0;
      } else if (m.dpow < 0.0) {
        singular = true;
      }
    }
    if (m.bpow != 0.0 || !m.logs.empty()) {
      if (interior) {
        if (m.bpow != 0.0) v *= std::exp(m.bpow * lx);
        for (int k : m.logs) v *= iterated_log_value(k, xn);
      } else {
        double e = m.bpow;
        for (int k : m.logs) e += k;
        e = snap_exponent(e);
        if (e > 0.0) {
          v = 0.0;
        } else if (e < 0.0 || !m.logs.empty()) {
          singular = true;
        }
      }
    }
    if (singular) {
      blown = true;
      continue;
    }
    total += v;
  }
  return blown ? non_finite() : total;
}

Canonical add(const Canonical& a, const Canonical& b) {
  Canonical r;
  r.terms.reserve(a.terms.size() + b.terms.size());
  r.terms.insert(r.terms.end(), a.terms.begin(), a.terms.end());
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  r.normalize();
  return r;
}

Canonical multiply(const Canonical& a, const Canonical& b) {
  Canonical r;
  r.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      Term t;
      t.coeff = ta.coeff * tb.coeff;
      t.m.mono = ta.m.mono;
      if (tb.m.mono.size() > t.m.mono.size()) t.m.mono.resize(tb.m.mono.size(), 0);
      for (std::size_t i = 0; i < tb.m.mono.size(); ++i) t.m.mono[i] += tb.m.mono[i];
      t.m.bpow = snap_exponent(ta.m.bpow + tb.m.bpow);
      t.m.logs = ta.m.logs;
      t.m.logs.insert(t.m.logs.end(), tb.m.logs.begin(), tb.m.logs.end());
      t.m.tpow = ta.m.tpow + tb.m.tpow;
      t.m.cutoffs = ta.m.cutoffs;
      t.m.cutoffs.insert(t.m.cutoffs.end(), tb.m.cutoffs.begin(), tb.m.cutoffs.end());
      if (ta.m.disk && tb.m.disk && compare_disk(ta.m.disk, tb.m.disk) != 0)
        throw ConfigError("products of distances to different disks are not supported");
      t.m.disk = ta.m.disk ? ta.m.disk : tb.m.disk;
      t.m.dpow = ta.m.dpow + tb.m.dpow;
      r.terms.push_back(std::move(t));
    }
  }
  r.normalize();
  return r;
}

Canonical scale(const Canonical& a, double c) {
  Canonical r = a;
  for (auto& t : r.terms) t.coeff *= c;
  r.normalize();
  return r;
}

Canonical diff_axis(const Canonical& a, int axis, std::size_t dim) {
  const bool normal = axis == static_cast<int>(dim) - 1;
  const bool time = axis < 0;
  std::vector<Term> out;
  for (const auto& t : a.terms) {
    if (time) {
      if (t.m.tpow > 0) {
        Term d = with_coeff(t, t.coeff * t.m.tpow);
        d.m.tpow -= 1;
        out.push_back(std::move(d));
      }
    } else if (normal) {
      if (t.m.bpow != 0.0) {
        Term d = with_coeff(t, t.coeff * t.m.bpow);
        d.m.bpow = snap_exponent(d.m.bpow - 1.0);
        out.push_back(std::move(d));
      }
      for (std::size_t i = 0; i < t.m.logs.size(); ++i) {
        Term d = t;
        if (d.m.logs[i] == 0) {
          d.m.logs.erase(d.m.logs.begin() + static_cast<std::ptrdiff_t>(i));
          d.m.bpow = snap_exponent(d.m.bpow - 1.0);
        } else {
          d.m.logs[i] -= 1;
        }
        out.push_back(std::move(d));
      }
    } else {
      const auto ax = static_cast<std::size_t>(axis);
      if (ax < t.m.mono.size() && t.m.mono[ax] > 0) {
        Term d = with_coeff(t, t.coeff * t.m.mono[ax]);
        d.m.mono[ax] -= 1;
        out.push_back(std::move(d));
      }
    }
    for (std::size_t f = 0; f < t.m.cutoffs.size(); ++f) {
      const CutoffSpec& s = *t.m.cutoffs[f].spec;
      double w = time ? s.t_weight : s.weight(static_cast<std::size_t>(axis));
      if (w == 0.0) continue;
      double c = time ? s.t_center : s.center.at(static_cast<std::size_t>(axis));
      Term d = t;
      d.m.cutoffs[f].derivative += 1;
      push_shifted(out, std::move(d), 2.0 * w, c, axis, dim);
    }
    if (t.m.disk && !time) {
      const DiskSpec& disk = *t.m.disk;
      Term d = t;
      d.m.dpow = snap_exponent(d.m.dpow - 1.0);
      double c = disk.center.at(static_cast<std::size_t>(axis));
      push_shifted(out, std::move(d), -t.m.dpow / disk.radius, c, axis, dim);
    }
  }
  Canonical r;
  r.terms = std::move(out);
  r.normalize();
  return r;
}

}  // namespace wholder
