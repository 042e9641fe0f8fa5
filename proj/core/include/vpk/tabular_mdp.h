#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vpk/environment.h"

namespace vpk {

/// Finite-horizon MDP with state-dependent rewards R(s) and a single initial
/// state. Transitions are stored densely as P[s][a][s'].
class TabularMdp {
 public:
  TabularMdp(int num_states, int num_actions, int horizon, int initial_state);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int initial_state() const { return initial_state_; }

  double transition(int s, int a, int next) const {
    return p_[Index(s, a, next)];
  }
  void set_transition(int s, int a, int next, double prob);
  double reward(int s) const { return rewards_[s]; }
  void set_reward(int s, double r);

  /// True when every action deterministically loops back to `s`. Such
  /// states have no meaningful choice and are excluded from loss accounting.
  bool IsActionFree(int s) const;

  /// Throws std::invalid_argument unless every (s, a) row sums to one within
  /// 1e-12 and all probabilities are in [0, 1].
  void Validate() const;

  nlohmann::json ToJson() const;
  /// Parses {"num_states", "num_actions", "horizon", "initial_state",
  /// "transitions": [[s,a,s',p],...], "rewards": [...]} and validates.
  static TabularMdp FromJson(const nlohmann::json& j);

 private:
  std::size_t Index(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ +
           next;
  }

  int num_states_;
  int num_actions_;
  int horizon_;
  int initial_state_;
  std::vector<double> p_;
  std::vector<double> rewards_;
};

/// Deterministic stationary policy over a tabular MDP: one action per state.
using TabularPolicy = std::vector<int>;

/// Adapts a TabularMdp to the Environment interface. States are encoded as
/// 1-vectors holding the state index; the reward of a step is R(s) of the
/// state the step starts from, so the return over T steps equals V_0(s_0).
class TabularEnvironment final : public Environment {
 public:
  explicit TabularEnvironment(std::shared_ptr<const TabularMdp> mdp,
                              std::string id = "tabular");

  std::string id() const override { return id_; }
  int state_dim() const override { return 1; }
  ActionSpace action_space() const override;
  int max_steps() const override { return mdp_->horizon(); }
  StateVector Reset(std::uint64_t seed) override;
  void SetState(const StateVector& s) override;
  const StateVector& state() const override { return state_; }
  StepResult Step(const Action& a) override;
  std::unique_ptr<Environment> Clone() const override;

  const TabularMdp& mdp() const { return *mdp_; }

 private:
  std::shared_ptr<const TabularMdp> mdp_;
  std::string id_;
  StateVector state_;
  Rng rng_;
};

/// Wraps a tabular policy as a Policy over index-encoded states.
Policy AsPolicy(const TabularPolicy& policy);

}  // namespace vpk
