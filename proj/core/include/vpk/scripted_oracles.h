#pragma once

#include <cstdint>
#include <memory>

#include "vpk/cartpole.h"
#include "vpk/duelpong.h"
#include "vpk/lqr.h"
#include "vpk/oracle.h"
#include "vpk/toypong.h"

namespace vpk {

/// Average return of taking `a` at `s` and then following `expert`, over
/// `horizon` steps in total (including the first). Each rollout uses a clone
/// of `env` reset with DeriveSeed(seed, i) and then moved to `s`. Throws
/// std::invalid_argument for horizon <= 0 or n_rollouts <= 0.
double McQEstimate(const Environment& env, const Policy& expert,
                   const StateVector& s, const Action& a, int n_rollouts,
                   int horizon, std::uint64_t seed);

/// Expert policy plus Monte-Carlo Q-values over a fixed horizon.
class ScriptedOracle final : public Oracle {
 public:
  ScriptedOracle(std::shared_ptr<const Environment> env, Policy expert,
                 int horizon, int n_rollouts = 1, std::uint64_t seed = 0);

  ActionSpace action_space() const override { return env_->action_space(); }
  Action Act(const StateVector& s) const override { return expert_(s); }
  double QValue(const StateVector& s, const Action& a) const override;

 private:
  std::shared_ptr<const Environment> env_;
  Policy expert_;
  int horizon_;
  int n_rollouts_;
  std::uint64_t seed_;
};

/// x-coordinate at which the ball next reaches the bottom edge, from
/// free flight with wall reflections.
double ToyPongLandingX(const ToyPongParams& params, const StateVector& s);
/// Moves the paddle toward the predicted landing point.
Policy ToyPongExpert(const ToyPongParams& params);
Policy DuelPongExpert(const DuelPongParams& params);

/// Bang-bang LQR controller for discrete cart-pole. Q(s, a) = -s'^T P s'
/// with s' the simulated successor under a and P the discrete LQR cost-to-go
/// of the linearization; Act is the argmax of Q.
class CartPoleLqrOracle final : public Oracle {
 public:
  explicit CartPoleLqrOracle(CartPoleParams params);

  ActionSpace action_space() const override;
  Action Act(const StateVector& s) const override;
  double QValue(const StateVector& s, const Action& a) const override;

  const LqrSolution& lqr() const { return lqr_; }

 private:
  CartPoleParams params_;
  LqrSolution lqr_;
};

}  // namespace vpk
