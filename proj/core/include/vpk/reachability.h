#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vpk/decision_tree.h"
#include "vpk/environment.h"
#include "vpk/piecewise_affine.h"
#include "vpk/polytope.h"

namespace vpk {

enum class SpecMode {
  /// Every run from `initial` must reach `target` within t_max steps (t >= 1)
  /// without passing through `unsafe` before that.
  kInvariant,
  /// No run from `initial` may touch `unsafe` at any t in [0, t_max].
  kUnsafe,
};

struct SafetySpec {
  Polytope initial;
  /// Union of polytopes.
  std::vector<Polytope> target;
  /// Union of polytopes.
  std::vector<Polytope> unsafe;
  int t_max = 1;
  SpecMode mode = SpecMode::kUnsafe;

  /// Throws std::invalid_argument on t_max < 1 or a dimension mismatch.
  void Validate(int dim) const;
};

enum class Outcome { kSafe, kCounterexample, kBudgetExceeded };

std::string OutcomeName(Outcome outcome);

struct Verdict {
  Outcome outcome = Outcome::kSafe;
  /// Step at which the violation is observed (t_max for a missed target).
  int violation_step = -1;
  /// "unsafe" or "target not reached".
  std::string reason;
  /// s_0 .. s_{violation_step} of the symbolic run through the witness.
  std::vector<StateVector> trace;
  /// Closed-loop piece applied at each step.
  std::vector<int> piece_path;
  /// The witness initial state as exact rationals ("p/q").
  std::vector<std::string> initial_exact;
  /// Margin by which the witness satisfies every path constraint; 0 when
  /// only the exact witness exists.
  double witness_margin = 0.0;
  std::int64_t nodes = 0;
  std::optional<bool> replay_ok;

  nlohmann::json ToJson() const;
};

struct ReachOptions {
  /// Maximum number of feasibility checks.
  std::int64_t node_budget = 1'000'000;
};

/// Product of an open-loop piecewise-affine system (pieces tagged by action)
/// and a discrete-leaf tree: for each reachable leaf and each piece of the
/// leaf's action, the guard is leaf box followed by piece guard. Empty
/// intersections are dropped.
PiecewiseAffineSystem ComposeClosedLoop(const PiecewiseAffineSystem& env,
                                        const DecisionTree& tree);

/// Exhaustive symbolic exploration of the piece paths of a closed-loop
/// system in exact rational arithmetic. The reachable set along a path is
/// kept as constraints on the initial state, so every step maps exactly. The
/// first counterexample in depth-first piece order is reported.
Verdict ReachCheck(const PiecewiseAffineSystem& system, const SafetySpec& spec,
                   const ReachOptions& options = {});

using StepFunction = std::function<StateVector(const StateVector&)>;

/// Simulates `step` from s0 and reports whether the run violates the spec
/// within t_max steps, with the same semantics as ReachCheck.
bool ReplayCounterexample(const StateVector& s0, const StepFunction& step,
                          const SafetySpec& spec);

/// Replays trace[0] on a clone of `env` under the tree's actions.
bool ReplayCounterexample(const std::vector<StateVector>& trace,
                          const Environment& env, const DecisionTree& tree,
                          const SafetySpec& spec);

}  // namespace vpk
