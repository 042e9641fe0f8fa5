#pragma once

#include <vector>

#include "vpk/tabular_mdp.h"

namespace vpk {

/// Exact finite-horizon quantities of a fixed policy:
///   V[t][s] for t in [0, T] with V[T] = 0,
///   Q[t][s][a] for t in [0, T),
///   d[t][s] for t in [0, T] with d[0] the indicator of the initial state.
struct ValueTables {
  int horizon = 0;
  std::vector<std::vector<double>> V;
  std::vector<std::vector<std::vector<double>>> Q;
  std::vector<std::vector<double>> d;

  /// J(pi) = -V_0(s_0).
  double cost_to_go(int initial_state) const { return -V[0][initial_state]; }
  /// Time-averaged state distribution T^{-1} sum_{t<T} d_t.
  std::vector<double> AverageDistribution() const;
};

/// Backward induction for V and Q, forward induction for d.
ValueTables DpEvaluate(const TabularMdp& mdp, const TabularPolicy& policy);

/// E_{s ~ d^pi}[1{pi(s) != pi*(s)}], with action-free states contributing 0.
double ZeroOneLoss(const TabularMdp& mdp, const TabularPolicy& policy,
                   const TabularPolicy& oracle);

/// T^{-1} sum_t E_{s ~ d_t^pi}[V*_t(s) - Q*_t(s, pi(s))] where V*, Q* are the
/// oracle's own value tables. Satisfies T * loss = J(pi) - J(pi*).
double QDaggerLoss(const TabularMdp& mdp, const TabularPolicy& policy,
                   const TabularPolicy& oracle);
/// Same, with the oracle's tables precomputed by DpEvaluate.
double QDaggerLoss(const TabularMdp& mdp, const TabularPolicy& policy,
                   const ValueTables& oracle_values);

/// V*_t(s) - min_a Q*_t(s, a) for the oracle's tables. Zero at action-free
/// states and whenever all actions have equal Q*.
double EllTilde(const TabularMdp& mdp, const ValueTables& oracle_values,
                int t, int s);

}  // namespace vpk
