#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "vpk/action.h"
#include "vpk/types.h"

namespace vpk {

struct StepResult {
  StateVector state;
  double reward = 0.0;
  bool done = false;
};

/// A deterministic episodic simulator. Instances carry the mutable episode
/// state; use Clone() to branch from a snapshot.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual int state_dim() const = 0;
  virtual ActionSpace action_space() const = 0;
  /// Episode length cap used when a rollout does not specify one.
  virtual int max_steps() const = 0;

  /// Starts a new episode; all randomness in the episode derives from `seed`.
  virtual StateVector Reset(std::uint64_t seed) = 0;
  /// Overwrites the observable state. Hidden state (scores, opponent
  /// position) is reinitialized deterministically from `s`.
  virtual void SetState(const StateVector& s) = 0;
  virtual const StateVector& state() const = 0;
  virtual StepResult Step(const Action& a) = 0;

  virtual std::unique_ptr<Environment> Clone() const = 0;
};

using Policy = std::function<Action(const StateVector&)>;

}  // namespace vpk
