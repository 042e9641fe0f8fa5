#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vpk/environment.h"

namespace vpk {

/// A reference controller pi* with a Q-function. Implementations are
/// immutable and safe to query concurrently.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual ActionSpace action_space() const = 0;
  virtual Action Act(const StateVector& s) const = 0;
  virtual double QValue(const StateVector& s, const Action& a) const = 0;

  /// Q-values of every discrete action, in index order. The default loops
  /// over QValue; throws std::logic_error for continuous action spaces.
  virtual std::vector<double> QValues(const StateVector& s) const;
};

/// ell~(s) = Q(s, act(s)) - min_a Q(s, a) for a discrete-action oracle.
double EllTilde(const Oracle& oracle, const StateVector& s);

/// Index of the largest entry; ties go to the lowest index.
int ArgMax(const std::vector<double>& values);

/// The oracle's Act as a Policy. The returned function shares ownership.
Policy AsPolicy(std::shared_ptr<const Oracle> oracle);

/// Action probabilities of a stochastic policy, one entry per action.
using StochasticPolicy = std::function<std::vector<double>(const StateVector&)>;

/// log pi(s, a). Throws std::domain_error when the probability is not
/// positive and std::invalid_argument when the probabilities do not sum to one
/// within 1e-9.
double MaxEntQ(const StochasticPolicy& policy, const StateVector& s, int a);

/// Wraps a stochastic policy: Act is the most probable action and
/// QValue = MaxEntQ.
class MaxEntOracle final : public Oracle {
 public:
  MaxEntOracle(StochasticPolicy policy, int num_actions);

  ActionSpace action_space() const override { return ActionSpace::Discrete(num_actions_); }
  Action Act(const StateVector& s) const override;
  double QValue(const StateVector& s, const Action& a) const override;
  std::vector<double> QValues(const StateVector& s) const override;

 private:
  StochasticPolicy policy_;
  int num_actions_;
};

/// Builds an oracle by name for an environment:
///   "lqr"    cart-pole LQR on the linearization (discrete or continuous),
///   "ilqr"   cart-pole receding-horizon iLQR with LQR fallback,
///   "expert" scripted toy-Pong / duel-Pong experts with Monte-Carlo Q,
/// or a path to an oracle JSON file. `options` may override oracle settings.
std::shared_ptr<const Oracle> MakeOracle(const std::string& spec,
                                         const Environment& env,
                                         const nlohmann::json& options = {});

}  // namespace vpk
