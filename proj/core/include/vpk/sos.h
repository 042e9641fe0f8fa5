#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vpk/polynomial.h"

namespace vpk {

/// Affine expression in the unknowns of an SOS program.
struct LinearExpr {
  double constant = 0.0;
  std::map<std::string, double> coeffs;

  bool operator==(const LinearExpr&) const = default;
};

/// Polynomial in the state variables whose coefficients are affine in the
/// unknowns; required to be nonnegative ("nonneg") or nonpositive
/// ("nonpos") everywhere.
struct SosConstraint {
  std::string kind;
  std::map<Polynomial::Exponents, LinearExpr> terms;

  bool operator==(const SosConstraint&) const = default;
};

/// Text document describing an SOS feasibility or optimization problem for
/// external solvers. Format, one item per line:
///
///   vpk-sos 1
///   mode candidate|roa
///   variables x0 x1 ...
///   unknowns p_0_0 p_0_1 ...
///   psd <name> <entry unknowns, row-major upper triangle>   (optional, repeated)
///   fixed P <n*n values, row-major>                         (optional)
///   objective feasibility | maximize <unknown>
///   constraint nonneg|nonpos
///   term <exponents> : <constant> [<unknown> <coefficient>]...
///   end
struct SosProgram {
  std::string mode;
  std::vector<std::string> variables;
  std::vector<std::string> unknowns;
  std::vector<std::pair<std::string, std::vector<std::string>>> psd;
  std::vector<double> fixed_p;
  std::string objective = "feasibility";
  std::vector<SosConstraint> constraints;

  std::string ToText() const;
  /// Throws std::invalid_argument with the line number on malformed input.
  static SosProgram FromText(const std::string& text);

  bool operator==(const SosProgram&) const = default;
};

/// Quadratic Lyapunov candidate for ds = A s: find symmetric P with
/// s'Ps - |s|^2 >= 0 and s'PAs + |s|^2 <= 0.
SosProgram EmitLyapunovSos(const Eigen::MatrixXd& A);

/// Level maximization for fixed P and field f: maximize rho subject to
/// (s'Lambda s) Vdot(s) + (rho - s'Ps) |s|^2 <= 0 with Lambda PSD, where
/// Vdot = 2 s'P f(s).
SosProgram EmitRoaSos(const Eigen::MatrixXd& P, const PolynomialMap& f);

}  // namespace vpk
