#include "vpk/rational.h"

#include <cmath>
#include <stdexcept>

namespace vpk {

Rational ToRational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot convert a non-finite double to a rational");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

std::vector<Rational> ToRational(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<Rational> out;
  out.reserve(v.size());
  for (int i = 0; i < v.size(); ++i) out.push_back(ToRational(v[i]));
  return out;
}

double ToDouble(const Rational& q) { return q.get_d(); }

Eigen::VectorXd ToDouble(const std::vector<Rational>& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = ToDouble(v[i]);
  return out;
}

RationalMatrix ToRationalMatrix(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  RationalMatrix out(m.rows(), std::vector<Rational>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out[i][j] = ToRational(m(i, j));
  }
  return out;
}

RationalMatrix Identity(int n) {
  RationalMatrix out(n, std::vector<Rational>(n, 0));
  for (int i = 0; i < n; ++i) out[i][i] = 1;
  return out;
}

RationalMatrix Multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t inner = b.size();
  const std::size_t m = inner == 0 ? 0 : b.front().size();
  RationalMatrix out(n, std::vector<Rational>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      if (sgn(a[i][k]) == 0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (sgn(b[k][j]) != 0) out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

std::vector<Rational> Multiply(const RationalMatrix& a, const std::vector<Rational>& x) {
  std::vector<Rational> out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = Dot(a[i], x);
  return out;
}

std::vector<Rational> LeftMultiply(const std::vector<Rational>& v, const RationalMatrix& a) {
  const std::size_t m = a.empty() ? 0 : a.front().size();
  std::vector<Rational> out(m, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (sgn(a[i][j]) != 0) out[j] += v[i] * a[i][j];
    }
  }
  return out;
}

Rational Dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot product of mismatched vectors");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
  }
  return s;
}

}  // namespace vpk
