#include "vpk/piecewise_affine.h"

#include <sstream>
#include <stdexcept>

namespace vpk {

bool LinearConstraint::SatisfiedBy(
    const Eigen::Ref<const Eigen::VectorXd>& s) const {
  const double lhs = normal.dot(s);
  return strict ? lhs < offset : lhs <= offset;
}

LinearConstraint LinearConstraint::Negated() const {
  return {-normal, -offset, !strict};
}

LinearConstraint LinearConstraint::Upper(int dim, int coord, double bound,
                                         bool strict) {
  LinearConstraint c{Eigen::VectorXd::Zero(dim), bound, strict};
  c.normal[coord] = 1.0;
  return c;
}

LinearConstraint LinearConstraint::Lower(int dim, int coord, double bound,
                                         bool strict) {
  LinearConstraint c{Eigen::VectorXd::Zero(dim), -bound, strict};
  c.normal[coord] = -1.0;
  return c;
}

bool AffinePiece::Contains(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  for (const auto& g : guard) {
    if (!g.SatisfiedBy(s)) return false;
  }
  return true;
}

StateVector AffinePiece::Apply(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  return M * s + c;
}

void PiecewiseAffineSystem::AddPiece(AffinePiece piece) {
  if (piece.M.rows() != dim_ || piece.M.cols() != dim_ || piece.c.size() != dim_) {
    throw std::invalid_argument("affine piece dimension mismatch");
  }
  for (const auto& g : piece.guard) {
    if (g.normal.size() != dim_) {
      throw std::invalid_argument("guard dimension mismatch");
    }
  }
  pieces_.push_back(std::move(piece));
}

std::vector<int> PiecewiseAffineSystem::MatchingPieces(
    const Eigen::Ref<const Eigen::VectorXd>& s, int action) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (action >= 0 && p.action != action) continue;
    if (p.Contains(s)) out.push_back(static_cast<int>(i));
  }
  return out;
}

StateVector PiecewiseAffineSystem::Step(
    const Eigen::Ref<const Eigen::VectorXd>& s, int action) const {
  const auto match = MatchingPieces(s, action);
  if (match.size() != 1) {
    std::ostringstream msg;
    msg << "piecewise-affine step: " << match.size()
        << " pieces match state (" << s.transpose() << ")";
    throw std::runtime_error(msg.str());
  }
  return pieces_[match[0]].Apply(s);
}

}  // namespace vpk
