#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vpk/rational.h"

namespace vpk {

/// Incremental feasibility checker for conjunctions of linear constraints
/// a . x <= b and a . x < b over the rationals: the general simplex of
/// Dutertre and de Moura with Bland's rule. Strict bounds use delta-rationals,
/// so the answer is exact. Constraints added after Push() are removed by the
/// matching Pop().
class Simplex {
 public:
  explicit Simplex(int num_vars);

  int num_vars() const { return num_vars_; }
  std::size_t num_constraints() const { return vars_.size() - num_vars_; }

  void AddConstraint(const std::vector<Rational>& a, const Rational& b, bool strict);
  void Push();
  void Pop();

  /// True when the asserted constraints have a common solution.
  bool Check();

  /// A satisfying assignment of the original variables with a concrete delta.
  /// Only meaningful after Check() returned true.
  std::vector<Rational> Model() const;

  std::int64_t pivots() const { return pivots_; }

 private:
  struct Var {
    bool basic = false;
    /// Row index for basic variables, slot index otherwise.
    int where = -1;
    std::optional<DeltaRational> upper;
    DeltaRational value;
  };
  struct Row {
    int basic = -1;
    /// Coefficients over the nonbasic slots.
    std::vector<Rational> coef;
  };

  void Pivot(int row, int slot);
  void PivotAndUpdate(int row, int slot, const DeltaRational& target);
  void RemoveRow(int row);
  void RemoveLastVar();

  int num_vars_;
  std::vector<Var> vars_;
  std::vector<Row> rows_;
  std::vector<int> nonbasic_;
  std::vector<std::size_t> marks_;
  std::int64_t pivots_ = 0;
};

}  // namespace vpk
