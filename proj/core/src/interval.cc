#include "vpk/interval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vpk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Down(double x) { return std::nextafter(x, -kInf); }
double Up(double x) { return std::nextafter(x, kInf); }

}  // namespace

Interval Interval::operator+(const Interval& o) const { return {Down(lo + o.lo), Up(hi + o.hi)}; }

Interval Interval::operator-(const Interval& o) const { return {Down(lo - o.hi), Up(hi - o.lo)}; }

Interval Interval::operator*(const Interval& o) const {
  const double p[4] = {lo * o.lo, lo * o.hi, hi * o.lo, hi * o.hi};
  // 0 * inf can only come from unbounded operands, which are not used.
  return {Down(*std::min_element(p, p + 4)), Up(*std::max_element(p, p + 4))};
}

namespace {

// Enclosure of v^n for a point v.
Interval PointPow(double v, int n) {
  Interval r(1.0);
  for (int i = 0; i < n; ++i) r = r * Interval(v);
  return r;
}

}  // namespace

Interval Pow(const Interval& x, int n) {
  if (n < 0) throw std::invalid_argument("negative interval power");
  if (n == 0) return Interval(1.0);
  // x^n is monotone for odd n and monotone in |x| for even n.
  if (n % 2 == 1) return {PointPow(x.lo, n).lo, PointPow(x.hi, n).hi};
  const double a = std::abs(x.lo), b = std::abs(x.hi);
  const double m = x.Contains(0.0) ? 0.0 : std::min(a, b);
  return {std::max(0.0, PointPow(m, n).lo), PointPow(std::max(a, b), n).hi};
}

Interval Intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

IntervalPolynomial::IntervalPolynomial(const Polynomial& p) : num_vars_(p.num_vars()) {
  for (const auto& [e, c] : p.terms()) {
    terms_.push_back({e, c});
    if (num_vars_ > 0) max_degree_ = std::max(max_degree_, e[0]);
  }
  if (num_vars_ > 0) {
    terms_by_power_.resize(max_degree_ + 1);
    for (const Term& t : terms_) {
      Term rest = t;
      rest.exponents[0] = 0;
      terms_by_power_[t.exponents[0]].push_back(rest);
    }
  }
}

namespace {

Interval Monomial(const std::vector<int>& e, double c, const Box& box) {
  Interval r(c);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] > 0) r = r * Pow(box[i], e[i]);
  }
  return r;
}

}  // namespace

Interval IntervalPolynomial::EvaluateNatural(const Box& box) const {
  if (static_cast<int>(box.size()) != num_vars_) throw std::invalid_argument("box dimension mismatch");
  Interval sum(0.0);
  for (const Term& t : terms_) sum += Monomial(t.exponents, t.coefficient, box);
  return sum;
}

Interval IntervalPolynomial::EvaluateHorner(const Box& box) const {
  if (static_cast<int>(box.size()) != num_vars_) throw std::invalid_argument("box dimension mismatch");
  if (num_vars_ == 0) return EvaluateNatural(box);
  Interval acc(0.0);
  for (int k = max_degree_; k >= 0; --k) {
    Interval coeff(0.0);
    for (const Term& t : terms_by_power_[k]) coeff += Monomial(t.exponents, t.coefficient, box);
    acc = acc * box[0] + coeff;
  }
  return acc;
}

Interval IntervalPolynomial::Evaluate(const Box& box) const {
  return Intersect(EvaluateNatural(box), EvaluateHorner(box));
}

}  // namespace vpk
