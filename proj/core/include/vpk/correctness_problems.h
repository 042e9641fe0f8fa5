#pragma once

#include "vpk/cartpole.h"
#include "vpk/decision_tree.h"
#include "vpk/reachability.h"
#include "vpk/toypong.h"

namespace vpk {

/// Balls start in the upper half moving down, anywhere horizontally, with the
/// paddle anywhere. Every run must see vy > 0 (a paddle hit) within
/// ToyPongHorizon steps and never reach y <= 0 with vy < 0.
SafetySpec ToyPongSafetySpec(const ToyPongParams& params);

/// Narrow start set: ball dropping straight down (vx = 0) over
/// x in [10.5, 19.5] with y in [y_max / 2, y_max] and the paddle at 15. Every
/// ball is caught by a stationary paddle iff half_paddle >= 4.5.
SafetySpec ToyPongCenteredSpec(const ToyPongParams& params);

PiecewiseAffineSystem ToyPongClosedLoop(const ToyPongParams& params, const DecisionTree& tree);

/// Concrete toy-Pong step under the tree, for replay.
StepFunction ToyPongTreeStep(const ToyPongParams& params, const DecisionTree& tree);

/// Closed loop of the discrete linearization s' = Ad s + Bd f with the tree's
/// forces, one piece per leaf.
PiecewiseAffineSystem CartPoleLinearClosedLoop(const CartPoleParams& params,
                                               const DecisionTree& tree);

/// Initial box [-init_range, init_range]^4; unsafe = {|theta| > y0}.
SafetySpec CartPoleSafetySpec(const CartPoleParams& params, double y0, int t_max);

/// Linearized cart-pole step under the tree, for replay.
StepFunction CartPoleLinearTreeStep(const CartPoleParams& params, const DecisionTree& tree);

/// Reach check of the linearized closed loop; counterexamples are replayed
/// on the linear dynamics and replay_ok is filled in.
Verdict CartPoleBoundedCheck(const CartPoleParams& params, const DecisionTree& tree, double y0,
                             int t_max, const ReachOptions& options = {});

}  // namespace vpk
