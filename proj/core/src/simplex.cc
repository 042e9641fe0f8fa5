#include "vpk/simplex.h"

#include <stdexcept>

namespace vpk {

Simplex::Simplex(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw std::invalid_argument("Simplex needs at least one variable");
  vars_.resize(num_vars);
  nonbasic_.resize(num_vars);
  for (int i = 0; i < num_vars; ++i) {
    vars_[i].where = i;
    nonbasic_[i] = i;
  }
}

void Simplex::AddConstraint(const std::vector<Rational>& a, const Rational& b, bool strict) {
  if (static_cast<int>(a.size()) != num_vars_) {
    throw std::invalid_argument("constraint has the wrong number of coefficients");
  }
  Row row;
  row.coef.assign(num_vars_, 0);
  for (int i = 0; i < num_vars_; ++i) {
    if (sgn(a[i]) == 0) continue;
    const Var& v = vars_[i];
    if (!v.basic) {
      row.coef[v.where] += a[i];
    } else {
      const std::vector<Rational>& c = rows_[v.where].coef;
      for (int j = 0; j < num_vars_; ++j) {
        if (sgn(c[j]) != 0) row.coef[j] += a[i] * c[j];
      }
    }
  }
  Var slack;
  slack.basic = true;
  slack.where = static_cast<int>(rows_.size());
  slack.upper = DeltaRational(b, strict ? Rational(-1) : Rational(0));
  for (int j = 0; j < num_vars_; ++j) {
    if (sgn(row.coef[j]) != 0) slack.value += vars_[nonbasic_[j]].value * row.coef[j];
  }
  row.basic = static_cast<int>(vars_.size());
  vars_.push_back(std::move(slack));
  rows_.push_back(std::move(row));
}

void Simplex::Push() { marks_.push_back(vars_.size()); }

void Simplex::Pop() {
  if (marks_.empty()) throw std::logic_error("Simplex::Pop without Push");
  const std::size_t mark = marks_.back();
  marks_.pop_back();
  while (vars_.size() > mark) RemoveLastVar();
  // Pivots during removal can leave a nonbasic variable above its bound; move
  // it back so Check() only has to look at basic variables.
  for (int j = 0; j < num_vars_; ++j) {
    Var& n = vars_[nonbasic_[j]];
    if (!n.upper || !(*n.upper < n.value)) continue;
    const DeltaRational shift = *n.upper - n.value;
    n.value = *n.upper;
    for (Row& r : rows_) {
      if (sgn(r.coef[j]) != 0) vars_[r.basic].value += shift * r.coef[j];
    }
  }
}

void Simplex::RemoveLastVar() {
  const int v = static_cast<int>(vars_.size()) - 1;
  if (!vars_[v].basic) {
    // Bring the variable back into the basis through any row that uses it.
    const int slot = vars_[v].where;
    int row = -1;
    for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
      if (sgn(rows_[r].coef[slot]) != 0) {
        row = r;
        break;
      }
    }
    if (row < 0) throw std::logic_error("Simplex tableau lost a nonbasic variable");
    Pivot(row, slot);
  }
  RemoveRow(vars_[v].where);
  vars_.pop_back();
}

void Simplex::RemoveRow(int row) {
  const int last = static_cast<int>(rows_.size()) - 1;
  if (row != last) {
    rows_[row] = std::move(rows_[last]);
    vars_[rows_[row].basic].where = row;
  }
  rows_.pop_back();
}

void Simplex::Pivot(int row, int slot) {
  ++pivots_;
  Row& r = rows_[row];
  const int leaving = r.basic;
  const int entering = nonbasic_[slot];
  const Rational inv = 1 / r.coef[slot];
  // entering = inv * leaving - sum_{k != slot} (c_k * inv) N_k.
  for (int k = 0; k < num_vars_; ++k) {
    if (k == slot) continue;
    if (sgn(r.coef[k]) != 0) r.coef[k] = -r.coef[k] * inv;
  }
  r.coef[slot] = inv;
  r.basic = entering;
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    if (i == row) continue;
    std::vector<Rational>& c = rows_[i].coef;
    if (sgn(c[slot]) == 0) continue;
    const Rational a = c[slot];
    for (int k = 0; k < num_vars_; ++k) {
      if (k == slot) continue;
      if (sgn(r.coef[k]) != 0) c[k] += a * r.coef[k];
    }
    c[slot] = a * inv;
  }
  vars_[entering].basic = true;
  vars_[entering].where = row;
  vars_[leaving].basic = false;
  vars_[leaving].where = slot;
  nonbasic_[slot] = leaving;
}

void Simplex::PivotAndUpdate(int row, int slot, const DeltaRational& target) {
  const Row& r = rows_[row];
  const int leaving = r.basic;
  const int entering = nonbasic_[slot];
  // Moving the entering variable by theta moves the leaving one by c * theta.
  const Rational inv = 1 / r.coef[slot];
  const DeltaRational theta = (target - vars_[leaving].value) * inv;
  vars_[leaving].value = target;
  vars_[entering].value += theta;
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    if (i == row) continue;
    const Rational& c = rows_[i].coef[slot];
    if (sgn(c) != 0) vars_[rows_[i].basic].value += theta * c;
  }
  Pivot(row, slot);
}

bool Simplex::Check() {
  for (;;) {
    // Bland: the violated basic variable with the smallest index.
    int row = -1;
    int best_var = -1;
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      const Var& v = vars_[rows_[i].basic];
      if (v.upper && *v.upper < v.value && (best_var < 0 || rows_[i].basic < best_var)) {
        best_var = rows_[i].basic;
        row = i;
      }
    }
    if (row < 0) return true;

    // The basic variable must decrease: raise a nonbasic with a negative
    // coefficient or lower one with a positive coefficient. Slacks only have
    // upper bounds, so they can always decrease; original variables are free.
    int slot = -1;
    int slot_var = -1;
    const std::vector<Rational>& c = rows_[row].coef;
    for (int j = 0; j < num_vars_; ++j) {
      if (sgn(c[j]) == 0) continue;
      const Var& n = vars_[nonbasic_[j]];
      const bool can_move = sgn(c[j]) > 0 || !n.upper || n.value < *n.upper;
      if (can_move && (slot_var < 0 || nonbasic_[j] < slot_var)) {
        slot = j;
        slot_var = nonbasic_[j];
      }
    }
    if (slot < 0) return false;
    PivotAndUpdate(row, slot, *vars_[best_var].upper);
  }
}

std::vector<Rational> Simplex::Model() const {
  // Largest admissible delta: every bound r + k d <= ur + uk d must hold.
  Rational delta = 1;
  for (const Var& v : vars_) {
    if (!v.upper) continue;
    const Rational dr = v.upper->r - v.value.r;
    const Rational dk = v.value.k - v.upper->k;
    if (sgn(dk) > 0 && sgn(dr) > 0) {
      const Rational bound = dr / dk;
      if (bound < delta) delta = bound;
    }
  }
  std::vector<Rational> out(num_vars_);
  for (int i = 0; i < num_vars_; ++i) out[i] = vars_[i].value.r + vars_[i].value.k * delta;
  return out;
}

}  // namespace vpk
