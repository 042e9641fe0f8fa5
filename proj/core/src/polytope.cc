#include "vpk/polytope.h"

#include <cmath>
#include <stdexcept>

#include "vpk/simplex.h"

namespace vpk {

bool Polytope::Contains(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  for (const LinearConstraint& c : constraints) {
    if (!c.SatisfiedBy(s)) return false;
  }
  return true;
}

bool Polytope::IsEmpty() const {
  Simplex simplex(dim);
  for (const LinearConstraint& c : constraints) {
    const RationalConstraint r = RationalConstraint::From(c);
    simplex.AddConstraint(r.a, r.b, r.strict);
  }
  return !simplex.Check();
}

Polytope Polytope::Intersect(const Polytope& other) const {
  if (dim != other.dim) throw std::invalid_argument("polytope dimensions differ");
  Polytope out = *this;
  out.constraints.insert(out.constraints.end(), other.constraints.begin(),
                         other.constraints.end());
  return out;
}

Polytope Polytope::Box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("box bounds differ in size");
  Polytope p;
  p.dim = static_cast<int>(lower.size());
  for (int i = 0; i < p.dim; ++i) {
    if (std::isfinite(lower[i])) p.constraints.push_back(LinearConstraint::Lower(p.dim, i, lower[i]));
    if (std::isfinite(upper[i])) p.constraints.push_back(LinearConstraint::Upper(p.dim, i, upper[i]));
  }
  return p;
}

Polytope Polytope::Universe(int dim) {
  Polytope p;
  p.dim = dim;
  return p;
}

nlohmann::json Polytope::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const LinearConstraint& c : constraints) {
    rows.push_back({{"normal", std::vector<double>(c.normal.data(), c.normal.data() + c.normal.size())},
                    {"offset", c.offset},
                    {"strict", c.strict}});
  }
  return {{"dim", dim}, {"constraints", rows}};
}

RationalConstraint RationalConstraint::From(const LinearConstraint& c) {
  return {ToRational(c.normal), ToRational(c.offset), c.strict};
}

bool RationalConstraint::SatisfiedBy(const std::vector<Rational>& x) const {
  const Rational lhs = Dot(a, x);
  return strict ? lhs < b : lhs <= b;
}

}  // namespace vpk
