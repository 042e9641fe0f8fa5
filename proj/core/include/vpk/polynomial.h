#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vpk {

/// Sparse multivariate polynomial with double coefficients. Monomials are
/// keyed by their exponent vectors; zero coefficients are never stored.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(int num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial Constant(int num_vars, double c);
  static Polynomial Variable(int num_vars, int index);

  int num_vars() const { return num_vars_; }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponents, double>& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }

  void AddTerm(const Exponents& exponents, double coefficient);
  double coefficient(const Exponents& exponents) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double scale) const;
  Polynomial& operator+=(const Polynomial& other);

  /// Product with every monomial of total degree above `max_degree` dropped.
  Polynomial MultiplyTruncated(const Polynomial& other, int max_degree) const;
  Polynomial Truncated(int max_degree) const;
  Polynomial Derivative(int var) const;
  /// Keeps only monomials whose total degree equals `degree`.
  Polynomial HomogeneousPart(int degree) const;

  double Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Replaces variable i by `replacement[i]`; all replacements must share one
  /// variable space, which becomes the result's.
  Polynomial Substitute(const std::vector<Polynomial>& replacement) const;

  /// Coefficients with magnitude <= tol are removed.
  Polynomial Pruned(double tol) const;

  /// Human-readable form, e.g. "-2*x0^2 + 2*x0^4". `names` defaults to x0..xn.
  std::string ToString(const std::vector<std::string>& names = {}) const;

 private:
  void CheckCompatible(const Polynomial& other) const;

  int num_vars_;
  std::map<Exponents, double> terms_;
};

inline Polynomial operator*(double scale, const Polynomial& p) {
  return p * scale;
}

/// Truncated power-series helpers. `p` must have a zero constant term.
Polynomial SeriesSin(const Polynomial& p, int max_degree);
Polynomial SeriesCos(const Polynomial& p, int max_degree);
/// 1 / (c + p) expanded to `max_degree`, c != 0.
Polynomial SeriesReciprocal(double c, const Polynomial& p, int max_degree);

/// Vector-valued polynomial map R^dim_in -> R^dim_out.
struct PolynomialMap {
  int dim_in = 0;
  std::vector<Polynomial> outputs;

  int dim_out() const { return static_cast<int>(outputs.size()); }
  int degree() const;
  Eigen::VectorXd Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Jacobian of the linear part at the origin (dim_out x dim_in).
  Eigen::MatrixXd LinearPart() const;
  /// Replaces the inputs by polynomials over a new variable space.
  PolynomialMap Substitute(const std::vector<Polynomial>& replacement) const;
};

}  // namespace vpk
