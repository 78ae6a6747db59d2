#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wholder/expression.hpp"

namespace wholder {

struct CutoffFactor {
  std::shared_ptr<const CutoffSpec> spec;
  int derivative = 0;
};

/// Product of elementary factors; x_N exponents are summed into bpow.
struct Monomial {
  std::vector<int> mono;  // tangential exponents, trailing zeros trimmed
  double bpow = 0.0;
  std::vector<int> logs;  // iterated-log levels on x_N, sorted
  int tpow = 0;
  std::vector<CutoffFactor> cutoffs;  // sorted
  std::shared_ptr<const DiskSpec> disk;
  double dpow = 0.0;
};

struct Term {
  double coeff = 0.0;
  Monomial m;
};

/// Sorted, merged sum of terms.
struct Canonical {
  std::vector<Term> terms;

  void normalize();
  [[nodiscard]] bool time_dependent() const;
  [[nodiscard]] double evaluate(std::span<const double> x, double t) const;
};

int compare(const Monomial& a, const Monomial& b);
Canonical add(const Canonical& a, const Canonical& b);
Canonical multiply(const Canonical& a, const Canonical& b);
Canonical scale(const Canonical& a, double c);
/// axis in [0, dim-1): tangential, axis == dim-1: x_N, axis < 0: t.
Canonical diff_axis(const Canonical& a, int axis, std::size_t dim);

}  // namespace wholder
