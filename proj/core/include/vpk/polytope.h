#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "vpk/piecewise_affine.h"
#include "vpk/rational.h"

namespace vpk {

/// Intersection of half-spaces n . s <= b (or < b when strict).
struct Polytope {
  int dim = 0;
  std::vector<LinearConstraint> constraints;

  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  /// Exact emptiness test over the rationals.
  bool IsEmpty() const;
  Polytope Intersect(const Polytope& other) const;

  /// Closed box lower <= s <= upper; infinite bounds are skipped.
  static Polytope Box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
  static Polytope Universe(int dim);

  nlohmann::json ToJson() const;
};

/// A constraint a . x <= b (or <) with exact coefficients.
struct RationalConstraint {
  std::vector<Rational> a;
  Rational b;
  bool strict = false;

  static RationalConstraint From(const LinearConstraint& c);
  /// Holds at the exact point x.
  bool SatisfiedBy(const std::vector<Rational>& x) const;
};

}  // namespace vpk
