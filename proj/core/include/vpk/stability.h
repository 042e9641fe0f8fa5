#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "vpk/decision_tree.h"
#include "vpk/polynomial.h"

namespace vpk {

/// P solving A'P + PA = -I. Throws std::invalid_argument unless A is Hurwitz.
Eigen::MatrixXd LyapunovCandidate(const Eigen::MatrixXd& A);

/// True when the symmetric matrix P is positive definite (LDLT with
/// pivoting, all pivots > 0).
bool IsPositiveDefinite(const Eigen::MatrixXd& P);

/// s'Ps as a polynomial.
Polynomial QuadraticForm(const Eigen::MatrixXd& P);

/// 2 s'P f(s), expanded.
Polynomial VdotPolynomial(const Eigen::MatrixXd& P, const PolynomialMap& f);

struct CertifyOptions {
  /// Points with |s|_2 < delta are excluded.
  double delta = 1e-4;
  /// Required decrease: Vdot(s) <= -margin_c |s|^2.
  double margin_c = 1e-3;
  std::int64_t budget = 10'000'000;
};

struct BranchAndBoundStats {
  std::int64_t boxes = 0;
  int max_depth = 0;
  /// Radius of the cube around the origin settled by the quadratic-part
  /// bound without branching.
  double cone_radius = 0.0;
};

enum class CertifyStatus { kCertified, kRefuted, kBudgetExhausted };

std::string CertifyStatusName(CertifyStatus status);

struct CertifyResult {
  CertifyStatus status = CertifyStatus::kBudgetExhausted;
  BranchAndBoundStats stats;
  /// A point in the region with Vdot(s) > -margin_c |s|^2, when refuted.
  std::optional<Eigen::VectorXd> violation;

  bool certified() const { return status == CertifyStatus::kCertified; }
};

/// Proves Vdot(s) <= -margin_c |s|^2 on {s'Ps <= rho, |s|_2 >= delta} by
/// interval branch-and-bound over the bounding box of the ellipsoid. Near the
/// origin the quadratic part of Vdot dominates; the cube on which a
/// norm bound on the higher-degree terms proves the inequality is settled
/// without branching.
CertifyResult CertifyRegion(const Eigen::MatrixXd& P, const PolynomialMap& f, double rho,
                            const CertifyOptions& options = {});

/// sqrt(rho (P^-1)_ii): half-width of {s'Ps <= rho} along axis i.
Eigen::VectorXd EllipsoidExtent(const Eigen::MatrixXd& P, double rho);

/// {s'Ps <= rho} contains the cube |s|_inf <= r.
bool SublevelContainsCube(const Eigen::MatrixXd& P, double rho, double r);

struct StabilityCertificate {
  Eigen::MatrixXd P;
  double rho = 0.0;
  double delta = 0.0;
  double margin_c = 0.0;
  /// Box of states routed to the certified leaf; unbounded for plain systems.
  LeafBox leaf_box;
  int leaf_node = -1;
  BranchAndBoundStats stats;
  /// The certified vector field, e.g. "taylor5 closed loop".
  std::string dynamics;

  double V(const Eigen::Ref<const Eigen::VectorXd>& s) const { return s.dot(P * s); }
  bool InRegion(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  nlohmann::json ToJson() const;
  static StabilityCertificate FromJson(const nlohmann::json& j);
};

struct MaxRhoOptions {
  CertifyOptions certify;
  /// At most this many bisection steps; stops early once
  /// hi - lo <= rel_tol * lo.
  int bisections = 20;
  double rel_tol = 1e-2;
  /// Box budget of each bisection step; an exhausted step counts as not
  /// certified. rho_min itself gets certify.budget.
  std::int64_t step_budget = 500'000;
  double rho_min = 1e-6;
  /// Upper limit on rho regardless of sampling.
  double rho_cap = std::numeric_limits<double>::infinity();
  /// Sampled directions and level-set scan used to bound rho from above.
  int directions = 1000;
  double scan_ratio = 1.05;
  double scan_max = 1e12;
  std::uint64_t seed = 0;
};

struct StabilityResult {
  std::optional<StabilityCertificate> certificate;
  /// Violation found at rho_min, when no positive level is certified.
  std::optional<Eigen::VectorXd> refutation;
  /// Upper end of the bisection.
  double rho_upper = 0.0;
  std::int64_t total_boxes = 0;
  std::string message;
};

/// Smallest level at which sampled directions show Vdot > -margin_c |s|^2.
double SampleRhoUpper(const Eigen::MatrixXd& P, const PolynomialMap& f,
                      const MaxRhoOptions& options);

/// Largest certified rho by geometric bisection on
/// [rho_min, min(sampled bound, cap)].
StabilityResult MaxRho(const Eigen::MatrixXd& P, const PolynomialMap& f,
                       const MaxRhoOptions& options = {});

/// Region of attraction of a linear-leaf tree: the leaf containing the
/// origin (strictly inside its box, no intercept) closes the loop
/// a = coef' s in `f_env`, whose inputs are (s, a). The level is capped so
/// the ellipsoid stays inside the leaf box.
StabilityResult TreeRoa(const DecisionTree& tree, const PolynomialMap& f_env,
                        const MaxRhoOptions& options = {});

/// Closed-loop map s -> f_env(s, coef' s).
PolynomialMap CloseLoop(const PolynomialMap& f_env, const Eigen::VectorXd& coef);

struct EnumerativeResult {
  std::vector<Eigen::VectorXd> violations;
  std::int64_t evaluated = 0;
  std::int64_t grid_points = 0;
  /// Stopped at max_points before covering the grid.
  bool truncated = false;
};

/// Grid baseline: Vdot >= 0 at grid points of spacing grid_step inside
/// {s'Ps <= rho} with |s|_2 >= delta. No soundness between grid points.
EnumerativeResult EnumerativeCheck(const Eigen::MatrixXd& P, const PolynomialMap& f, double rho,
                                   double grid_step, double delta = 1e-4,
                                   std::int64_t max_points = 100'000'000);

}  // namespace vpk
