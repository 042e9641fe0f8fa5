#pragma once

#include <vector>

#include "vpk/polynomial.h"

namespace vpk {

/// Closed interval with outward-rounded arithmetic: every operation widens
/// its result by one ulp on each side, so the exact result is enclosed.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double x) : lo(x), hi(x) {}  // NOLINT(google-explicit-constructor)
  Interval(double l, double h) : lo(l), hi(h) {}

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool Contains(double x) const { return lo <= x && x <= hi; }

  Interval operator+(const Interval& o) const;
  Interval operator-(const Interval& o) const;
  Interval operator-() const { return {-hi, -lo}; }
  Interval operator*(const Interval& o) const;
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
};

/// x^n, tight for even n (never negative).
Interval Pow(const Interval& x, int n);
Interval Intersect(const Interval& a, const Interval& b);

using Box = std::vector<Interval>;

/// Polynomial prepared for repeated interval evaluation.
class IntervalPolynomial {
 public:
  explicit IntervalPolynomial(const Polynomial& p);

  /// Natural extension (sum of monomial enclosures) intersected with a
  /// Horner form nested in the first variable.
  Interval Evaluate(const Box& box) const;
  Interval EvaluateNatural(const Box& box) const;
  Interval EvaluateHorner(const Box& box) const;
  int num_vars() const { return num_vars_; }

 private:
  struct Term {
    std::vector<int> exponents;
    double coefficient;
  };
  int num_vars_;
  int max_degree_ = 0;
  std::vector<Term> terms_;
  // terms_by_power_[k]: monomials of the first variable's power k, with that
  // power removed.
  std::vector<std::vector<Term>> terms_by_power_;
};

}  // namespace vpk
