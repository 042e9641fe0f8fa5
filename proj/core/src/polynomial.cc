#include "vpk/polynomial.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vpk {
namespace {

int TotalDegree(const Polynomial::Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

}  // namespace

Polynomial Polynomial::Constant(int num_vars, double c) {
  Polynomial p(num_vars);
  p.AddTerm(Exponents(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::Variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) {
    throw std::out_of_range("polynomial variable index out of range");
  }
  Polynomial p(num_vars);
  Exponents e(num_vars, 0);
  e[index] = 1;
  p.AddTerm(e, 1.0);
  return p;
}

int Polynomial::degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) deg = std::max(deg, TotalDegree(e));
  return deg;
}

void Polynomial::AddTerm(const Exponents& exponents, double coefficient) {
  if (static_cast<int>(exponents.size()) != num_vars_) {
    throw std::invalid_argument("monomial arity does not match polynomial");
  }
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coefficient(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::CheckCompatible(const Polynomial& other) const {
  if (num_vars_ != other.num_vars_) {
    throw std::invalid_argument("polynomials over different variable spaces");
  }
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  out += other;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  CheckCompatible(other);
  for (const auto& [e, c] : other.terms_) AddTerm(e, c);
  return *this;
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + (-other);
}

Polynomial Polynomial::operator*(double scale) const {
  Polynomial out(num_vars_);
  if (scale == 0.0) return out;
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * scale);
  return out;
}

Polynomial Polynomial::MultiplyTruncated(const Polynomial& other,
                                         int max_degree) const {
  CheckCompatible(other);
  Polynomial out(num_vars_);
  Exponents e(num_vars_);
  for (const auto& [e1, c1] : terms_) {
    const int d1 = TotalDegree(e1);
    for (const auto& [e2, c2] : other.terms_) {
      if (max_degree >= 0 && d1 + TotalDegree(e2) > max_degree) continue;
      for (int i = 0; i < num_vars_; ++i) e[i] = e1[i] + e2[i];
      out.AddTerm(e, c1 * c2);
    }
  }
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  return MultiplyTruncated(other, -1);
}

Polynomial Polynomial::Truncated(int max_degree) const {
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (TotalDegree(e) <= max_degree) out.terms_.emplace(e, c);
  }
  return out;
}

Polynomial Polynomial::HomogeneousPart(int degree) const {
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (TotalDegree(e) == degree) out.terms_.emplace(e, c);
  }
  return out;
}

Polynomial Polynomial::Derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw std::out_of_range("derivative var");
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    out.AddTerm(d, c * e[var]);
  }
  return out;
}

double Polynomial::Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != num_vars_) {
    throw std::invalid_argument("polynomial evaluated at wrong dimension");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::Substitute(
    const std::vector<Polynomial>& replacement) const {
  if (static_cast<int>(replacement.size()) != num_vars_) {
    throw std::invalid_argument("substitution needs one polynomial per var");
  }
  const int out_vars = replacement.empty() ? 0 : replacement[0].num_vars();
  for (const auto& r : replacement) {
    if (r.num_vars() != out_vars) {
      throw std::invalid_argument("substitution polynomials disagree on arity");
    }
  }
  Polynomial out(out_vars);
  // Cache powers per variable.
  std::vector<std::vector<Polynomial>> powers(num_vars_);
  for (const auto& [e, c] : terms_) {
    Polynomial term = Constant(out_vars, c);
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(Constant(out_vars, 1.0));
      while (static_cast<int>(cache.size()) <= e[i]) {
        cache.push_back(cache.back() * replacement[i]);
      }
      term = term * cache[e[i]];
    }
    out += term;
  }
  return out;
}

Polynomial Polynomial::Pruned(double tol) const {
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) > tol) out.terms_.emplace(e, c);
  }
  return out;
}

std::string Polynomial::ToString(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  // Ascending total degree reads naturally.
  std::vector<std::pair<Exponents, double>> ordered(terms_.begin(),
                                                    terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return TotalDegree(a.first) < TotalDegree(b.first);
  });
  for (const auto& [e, c] : ordered) {
    double coef = c;
    if (first) {
      if (coef < 0) out << "-";
    } else {
      out << (coef < 0 ? " - " : " + ");
    }
    coef = std::abs(coef);
    const bool constant = TotalDegree(e) == 0;
    if (constant || coef != 1.0) {
      out << coef;
      if (!constant) out << "*";
    }
    bool first_var = true;
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      if (!first_var) out << "*";
      first_var = false;
      if (i < static_cast<int>(names.size())) {
        out << names[i];
      } else {
        out << "x" << i;
      }
      if (e[i] > 1) out << "^" << e[i];
    }
    first = false;
  }
  return out.str();
}

namespace {

void RequireNoConstant(const Polynomial& p) {
  if (p.coefficient(Polynomial::Exponents(p.num_vars(), 0)) != 0.0) {
    throw std::invalid_argument("series argument must vanish at the origin");
  }
}

}  // namespace

Polynomial SeriesSin(const Polynomial& p, int max_degree) {
  RequireNoConstant(p);
  Polynomial out(p.num_vars());
  Polynomial power = p;  // p^1
  double factorial = 1.0;
  for (int k = 1; k <= max_degree; k += 2) {
    out += power * (((k / 2) % 2 == 0 ? 1.0 : -1.0) / factorial);
    power = power.MultiplyTruncated(p, max_degree).MultiplyTruncated(p, max_degree);
    factorial *= (k + 1) * (k + 2);
  }
  return out.Truncated(max_degree);
}

Polynomial SeriesCos(const Polynomial& p, int max_degree) {
  RequireNoConstant(p);
  Polynomial out = Polynomial::Constant(p.num_vars(), 1.0);
  Polynomial power = p.MultiplyTruncated(p, max_degree);  // p^2
  double factorial = 2.0;
  for (int k = 2; k <= max_degree; k += 2) {
    out += power * (((k / 2) % 2 == 0 ? 1.0 : -1.0) / factorial);
    power = power.MultiplyTruncated(p, max_degree).MultiplyTruncated(p, max_degree);
    factorial *= (k + 1) * (k + 2);
  }
  return out.Truncated(max_degree);
}

Polynomial SeriesReciprocal(double c, const Polynomial& p, int max_degree) {
  if (c == 0.0) throw std::invalid_argument("reciprocal of a series at zero");
  RequireNoConstant(p);
  // 1/(c + p) = (1/c) sum_k (-p/c)^k
  const Polynomial ratio = p * (-1.0 / c);
  Polynomial out = Polynomial::Constant(p.num_vars(), 1.0);
  Polynomial power = Polynomial::Constant(p.num_vars(), 1.0);
  for (int k = 1; k <= max_degree; ++k) {
    power = power.MultiplyTruncated(ratio, max_degree);
    if (power.is_zero()) break;
    out += power;
  }
  return out * (1.0 / c);
}

int PolynomialMap::degree() const {
  int deg = -1;
  for (const auto& p : outputs) deg = std::max(deg, p.degree());
  return deg;
}

Eigen::VectorXd PolynomialMap::Evaluate(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out(dim_out());
  for (int i = 0; i < dim_out(); ++i) out[i] = outputs[i].Evaluate(x);
  return out;
}

Eigen::MatrixXd PolynomialMap::LinearPart() const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim_out(), dim_in);
  for (int i = 0; i < dim_out(); ++i) {
    for (int j = 0; j < dim_in; ++j) {
      Polynomial::Exponents e(dim_in, 0);
      e[j] = 1;
      J(i, j) = outputs[i].coefficient(e);
    }
  }
  return J;
}

PolynomialMap PolynomialMap::Substitute(
    const std::vector<Polynomial>& replacement) const {
  PolynomialMap out;
  out.dim_in = replacement.empty() ? 0 : replacement[0].num_vars();
  for (const auto& p : outputs) out.outputs.push_back(p.Substitute(replacement));
  return out;
}

}  // namespace vpk
