#pragma once

#include <cstdint>
#include <memory>

#include <nlohmann/json.hpp>

#include "vpk/environment.h"
#include "vpk/piecewise_affine.h"

namespace vpk {

/// Single-paddle pong with elastic walls. State order: (x, y, vx, vy, xp).
/// The paddle sits at y = 0 and spans [xp - L, xp + L].
struct ToyPongParams {
  double x_max = 30.0;
  double y_max = 20.0;
  double v_min = 1.0;
  double v_max = 2.0;
  /// Half of the paddle length.
  double half_paddle = 4.0;
  double paddle_speed = 2.0;
  int max_steps = 250;
  /// Episodes start with y uniform in [init_y_fraction * y_max, y_max] and
  /// the paddle centred.
  double init_y_fraction = 0.75;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ToyPongParams FromJson(const nlohmann::json& j);
};

enum ToyPongAction { kPaddleLeft = 0, kPaddleRight = 1, kPaddleStay = 2 };
enum ToyPongState { kBallX = 0, kBallY = 1, kBallVx = 2, kBallVy = 3, kPaddleX = 4 };

struct ToyPongTransition {
  StateVector state;
  /// The ball crossed the bottom edge away from the paddle.
  bool done = false;
};

/// Paddle moves first (clamped to [0, x_max]); the ball then advances by its
/// velocity and reflects off side walls, the top wall, and finally the paddle.
ToyPongTransition ToyPongStep(const ToyPongParams& params,
                              const Eigen::Ref<const Eigen::VectorXd>& s,
                              int action);

/// Exact piecewise-affine form of ToyPongStep, with pieces tagged by action.
/// Missed-ball pieces continue free flight; the miss shows up as y <= 0 with
/// vy < 0 in the successor.
PiecewiseAffineSystem ToyPongPwa(const ToyPongParams& params);

/// Steps needed for the ball to return: ceil(2 y_max / v_min).
int ToyPongHorizon(const ToyPongParams& params);

class ToyPongEnv final : public Environment {
 public:
  explicit ToyPongEnv(ToyPongParams params = {});

  std::string id() const override { return "toypong"; }
  int state_dim() const override { return 5; }
  ActionSpace action_space() const override { return ActionSpace::Discrete(3); }
  int max_steps() const override { return params_.max_steps; }
  StateVector Reset(std::uint64_t seed) override;
  void SetState(const StateVector& s) override;
  const StateVector& state() const override { return state_; }
  /// Reward is 1 for every step after which the ball is still in play.
  StepResult Step(const Action& a) override;
  std::unique_ptr<Environment> Clone() const override;

  const ToyPongParams& params() const { return params_; }

 private:
  ToyPongParams params_;
  StateVector state_;
};

}  // namespace vpk
