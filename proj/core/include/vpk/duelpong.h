#pragma once

#include <cstdint>
#include <memory>

#include <nlohmann/json.hpp>

#include "vpk/environment.h"

namespace vpk {

/// Two-paddle pong against a scripted opponent. The player defends x = 0, the
/// opponent x = width. Observation order: (x, y, vx, vy, yp).
struct DuelPongParams {
  double width = 32.0;
  double height = 24.0;
  /// Horizontal ball speed is constant in magnitude.
  double ball_vx = 1.5;
  /// Serves draw |vy| uniformly from [vy_min, vy_max]; |vy| never exceeds
  /// vy_max.
  double vy_min = 0.5;
  double vy_max = 1.5;
  double player_half_length = 3.0;
  double player_speed = 3.0;
  double opponent_half_length = 3.0;
  /// Opponent moves toward the ball's y by at most this much per step.
  double opponent_speed = 1.0;
  /// vy gained per unit of normalized hit offset on opponent returns.
  double opponent_spin = 0.6;
  int rounds_to_win = 21;
  int max_steps = 20000;

  void Validate() const;
  nlohmann::json ToJson() const;
  static DuelPongParams FromJson(const nlohmann::json& j);
};

enum DuelPongAction { kPaddleUp = 0, kPaddleDown = 1, kPaddleHold = 2 };

/// Full simulator state: the observation plus hidden opponent position,
/// scores, and the serve stream.
struct DuelPongState {
  StateVector obs;
  double opponent_y = 0.0;
  int player_score = 0;
  int opponent_score = 0;
  std::uint64_t serve_counter = 0;
  std::uint64_t serve_seed = 0;
};

struct DuelPongTransition {
  DuelPongState state;
  /// +1 when the player scores, -1 when the opponent scores.
  double reward = 0.0;
  bool done = false;
};

DuelPongTransition DuelPongStep(const DuelPongParams& params,
                                const DuelPongState& s, int action);

/// Puts the ball at mid-court moving toward the opponent, with y and vy drawn
/// from the state's serve stream.
void DuelPongServe(const DuelPongParams& params, DuelPongState& s);

/// Scripted player rule: hold while the ball's y is within half a paddle step
/// of the paddle, otherwise move toward it. With player_speed > 2 vy_max the
/// paddle stays under the ball once it has caught up.
int DuelPongTrackingAction(const DuelPongParams& params,
                           const Eigen::Ref<const Eigen::VectorXd>& obs);

class DuelPongEnv final : public Environment {
 public:
  explicit DuelPongEnv(DuelPongParams params = {});

  std::string id() const override { return "duelpong"; }
  int state_dim() const override { return 5; }
  ActionSpace action_space() const override { return ActionSpace::Discrete(3); }
  int max_steps() const override { return params_.max_steps; }
  StateVector Reset(std::uint64_t seed) override;
  /// Opponent is placed at the ball's y and the score reset to 0-0; the
  /// serve stream keeps the seed of the last Reset.
  void SetState(const StateVector& s) override;
  const StateVector& state() const override { return state_.obs; }
  StepResult Step(const Action& a) override;
  std::unique_ptr<Environment> Clone() const override;

  const DuelPongParams& params() const { return params_; }
  const DuelPongState& full_state() const { return state_; }

 private:
  DuelPongParams params_;
  DuelPongState state_;
};

}  // namespace vpk
