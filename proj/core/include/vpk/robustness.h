#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vpk/decision_tree.h"

namespace vpk {

/// Infimum of |s - s0|_inf over the closure of `box`: the largest
/// per-coordinate gap max(0, lower_i - s0_i, s0_i - upper_i).
double LeafLinfDistance(const Eigen::Ref<const Eigen::VectorXd>& s0, const LeafBox& box);

struct RobustnessResult {
  /// +infinity when every reachable leaf agrees with the prediction at s0.
  double epsilon = 0.0;
  std::optional<int> witness_leaf;
  /// Nearest point of the witness leaf's closed box.
  std::optional<StateVector> witness_point;
};

/// Largest eps with pi(s) = pi(s0) on the open max-norm ball of radius eps:
/// the minimum box distance over reachable leaves whose action differs from
/// the one at s0. Discrete-leaf trees only.
RobustnessResult EpsilonRobustness(const DecisionTree& tree,
                                   const Eigen::Ref<const Eigen::VectorXd>& s0);

/// Moves `point` (on the closure of `box`) by `push` into the box along every
/// coordinate that sits on an open lower face, so that the result is routed
/// to the box's leaf.
StateVector PushIntoBox(const StateVector& point, const LeafBox& box, double push);

struct RobustnessRow {
  StateVector state;
  RobustnessResult result;
  double microseconds = 0.0;
};

/// Computes EpsilonRobustness for every state, timing each query.
std::vector<RobustnessRow> RobustnessBatch(const DecisionTree& tree,
                                           const std::vector<StateVector>& states);

/// CSV with columns s0..s{d-1}, epsilon, witness_leaf, microseconds. With
/// `include_timing` false the timing column is left empty, which makes the
/// file reproducible byte for byte.
std::string RobustnessCsv(const std::vector<RobustnessRow>& rows, int dim,
                          bool include_timing = true);

/// Runs the batch and writes the CSV to `path`; returns the rows.
std::vector<RobustnessRow> RobustnessReport(const DecisionTree& tree,
                                            const std::vector<StateVector>& states,
                                            const std::string& path);

}  // namespace vpk
