#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <gmpxx.h>

namespace vpk {

using Rational = mpq_class;

/// Exact value of a finite double. Throws std::invalid_argument for NaN/Inf.
Rational ToRational(double x);
std::vector<Rational> ToRational(const Eigen::Ref<const Eigen::VectorXd>& v);
double ToDouble(const Rational& q);
Eigen::VectorXd ToDouble(const std::vector<Rational>& v);

/// r + k * delta for an infinitesimal delta > 0. Used to represent strict
/// bounds exactly: x < b becomes x <= b - delta.
struct DeltaRational {
  Rational r;
  Rational k;

  DeltaRational() = default;
  DeltaRational(Rational real, Rational inf = 0) : r(std::move(real)), k(std::move(inf)) {}

  DeltaRational operator+(const DeltaRational& o) const { return {r + o.r, k + o.k}; }
  DeltaRational operator-(const DeltaRational& o) const { return {r - o.r, k - o.k}; }
  DeltaRational operator*(const Rational& c) const { return {r * c, k * c}; }
  DeltaRational& operator+=(const DeltaRational& o) {
    r += o.r;
    k += o.k;
    return *this;
  }
  bool operator<(const DeltaRational& o) const { return r < o.r || (r == o.r && k < o.k); }
  bool operator<=(const DeltaRational& o) const { return !(o < *this); }
  bool operator==(const DeltaRational& o) const { return r == o.r && k == o.k; }
};

/// Rational matrix helpers for exact affine composition.
using RationalMatrix = std::vector<std::vector<Rational>>;
RationalMatrix ToRationalMatrix(const Eigen::Ref<const Eigen::MatrixXd>& m);
RationalMatrix Identity(int n);
RationalMatrix Multiply(const RationalMatrix& a, const RationalMatrix& b);
std::vector<Rational> Multiply(const RationalMatrix& a, const std::vector<Rational>& x);
/// Row vector times matrix: (v^T A)^T.
std::vector<Rational> LeftMultiply(const std::vector<Rational>& v, const RationalMatrix& a);
Rational Dot(const std::vector<Rational>& a, const std::vector<Rational>& b);

}  // namespace vpk
