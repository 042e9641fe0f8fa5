#pragma once

#include <cstdint>
#include <vector>

#include "vpk/environment.h"

namespace vpk {

/// A sampled episode. `states` holds one more entry than `actions`: the state
/// reached after the last action (or the initial state for empty rollouts).
struct Trajectory {
  std::vector<StateVector> states;
  std::vector<Action> actions;
  std::vector<double> rewards;
  /// Set when the environment ended the episode (not the step cap).
  bool terminated_early = false;

  int length() const { return static_cast<int>(actions.size()); }
  double total_reward() const;
};

/// Resets a clone of `env` with `seed` and applies `policy` for at most
/// `max_steps` steps. Throws std::runtime_error when the simulator produces a
/// non-finite state and std::invalid_argument for negative `max_steps`.
Trajectory Rollout(const Environment& env, const Policy& policy, int max_steps,
                   std::uint64_t seed);

/// Same as Rollout but continues an existing environment instance in place.
Trajectory RolloutFrom(Environment& env, const Policy& policy, int max_steps);

/// Mean total reward over `n` rollouts with seeds DeriveSeed(seed, i).
double MeanReward(const Environment& env, const Policy& policy, int n,
                  std::uint64_t seed, int max_steps = -1);

}  // namespace vpk
