#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vpk/types.h"

namespace vpk {

/// normal . s <= offset, or < offset when strict.
struct LinearConstraint {
  Eigen::VectorXd normal;
  double offset = 0.0;
  bool strict = false;

  bool SatisfiedBy(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  /// The complement: normal . s > offset (or >= when this is strict).
  LinearConstraint Negated() const;

  static LinearConstraint Upper(int dim, int coord, double bound,
                                bool strict = false);
  static LinearConstraint Lower(int dim, int coord, double bound,
                                bool strict = false);
};

/// One cell of a piecewise-affine map: on the guard, s' = M s + c.
struct AffinePiece {
  std::vector<LinearConstraint> guard;
  Eigen::MatrixXd M;
  Eigen::VectorXd c;
  /// Action this piece applies to for open-loop environment descriptions;
  /// -1 for closed-loop pieces.
  int action = -1;
  std::string label;

  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  StateVector Apply(const Eigen::Ref<const Eigen::VectorXd>& s) const;
};

/// A partition of the state space into polytopic guards, each carrying an
/// affine update. Environments list pieces per action; closed loops have
/// action-free pieces.
class PiecewiseAffineSystem {
 public:
  explicit PiecewiseAffineSystem(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  void AddPiece(AffinePiece piece);

  /// Index of every piece whose guard holds at `s` (for `action`, or any
  /// action when -1).
  std::vector<int> MatchingPieces(const Eigen::Ref<const Eigen::VectorXd>& s,
                                  int action = -1) const;
  /// Applies the unique matching piece. Throws std::runtime_error when zero or
  /// several pieces match.
  StateVector Step(const Eigen::Ref<const Eigen::VectorXd>& s,
                   int action = -1) const;

 private:
  int dim_;
  std::vector<AffinePiece> pieces_;
};

}  // namespace vpk
