#include "vpk/duelpong.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpk {

void DuelPongParams::Validate() const {
  if (!(width > 0 && height > 0)) throw std::invalid_argument("duel pong court must be positive");
  if (!(ball_vx > 0)) throw std::invalid_argument("duel pong ball_vx must be positive");
  if (!(vy_min > 0 && vy_min <= vy_max)) {
    throw std::invalid_argument("duel pong needs 0 < vy_min <= vy_max");
  }
  if (!(player_half_length > 0 && opponent_half_length > 0)) {
    throw std::invalid_argument("duel pong paddle half lengths must be positive");
  }
  if (!(player_speed > 0 && opponent_speed > 0)) {
    throw std::invalid_argument("duel pong paddle speeds must be positive");
  }
  if (opponent_spin < 0) throw std::invalid_argument("duel pong opponent_spin < 0");
  if (rounds_to_win != 21) throw std::invalid_argument("duel pong plays to 21");
  if (max_steps < 1) throw std::invalid_argument("duel pong max_steps < 1");
}

nlohmann::json DuelPongParams::ToJson() const {
  return {{"width", width},
          {"height", height},
          {"ball_vx", ball_vx},
          {"vy_min", vy_min},
          {"vy_max", vy_max},
          {"player_half_length", player_half_length},
          {"player_speed", player_speed},
          {"opponent_half_length", opponent_half_length},
          {"opponent_speed", opponent_speed},
          {"opponent_spin", opponent_spin},
          {"rounds_to_win", rounds_to_win},
          {"max_steps", max_steps}};
}

DuelPongParams DuelPongParams::FromJson(const nlohmann::json& j) {
  DuelPongParams p;
  p.width = j.value("width", p.width);
  p.height = j.value("height", p.height);
  p.ball_vx = j.value("ball_vx", p.ball_vx);
  p.vy_min = j.value("vy_min", p.vy_min);
  p.vy_max = j.value("vy_max", p.vy_max);
  p.player_half_length = j.value("player_half_length", p.player_half_length);
  p.player_speed = j.value("player_speed", p.player_speed);
  p.opponent_half_length = j.value("opponent_half_length", p.opponent_half_length);
  p.opponent_speed = j.value("opponent_speed", p.opponent_speed);
  p.opponent_spin = j.value("opponent_spin", p.opponent_spin);
  p.rounds_to_win = j.value("rounds_to_win", p.rounds_to_win);
  p.max_steps = j.value("max_steps", p.max_steps);
  p.Validate();
  return p;
}

void DuelPongServe(const DuelPongParams& p, DuelPongState& s) {
  Rng rng(DeriveSeed(s.serve_seed, s.serve_counter++));
  s.obs[0] = p.width / 2.0;
  s.obs[1] = UniformIn(rng, 0.25 * p.height, 0.75 * p.height);
  s.obs[2] = p.ball_vx;
  const double speed = UniformIn(rng, p.vy_min, p.vy_max);
  s.obs[3] = Uniform01(rng) < 0.5 ? -speed : speed;
}

namespace {

double Clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

DuelPongTransition DuelPongStep(const DuelPongParams& p, const DuelPongState& s,
                                int action) {
  if (s.obs.size() != 5) throw std::invalid_argument("duel pong state must be 5-D");
  DuelPongTransition out;
  out.state = s;
  DuelPongState& n = out.state;
  StateVector& o = n.obs;

  switch (action) {
    case kPaddleUp:
      o[4] = Clamp(o[4] + p.player_speed, 0.0, p.height);
      break;
    case kPaddleDown:
      o[4] = Clamp(o[4] - p.player_speed, 0.0, p.height);
      break;
    case kPaddleHold:
      break;
    default:
      throw std::invalid_argument("duel pong action must be 0, 1 or 2");
  }
  const double chase = Clamp(o[1] - n.opponent_y, -p.opponent_speed, p.opponent_speed);
  n.opponent_y = Clamp(n.opponent_y + chase, 0.0, p.height);

  o[0] += o[2];
  o[1] += o[3];
  if (o[1] < 0.0) {
    o[1] = -o[1];
    o[3] = -o[3];
  } else if (o[1] > p.height) {
    o[1] = 2.0 * p.height - o[1];
    o[3] = -o[3];
  }

  if (o[0] <= 0.0) {
    if (std::abs(o[1] - o[4]) <= p.player_half_length) {
      o[0] = -o[0];
      o[2] = -o[2];
    } else {
      ++n.opponent_score;
      out.reward = -1.0;
      DuelPongServe(p, n);
    }
  } else if (o[0] >= p.width) {
    const double offset = o[1] - n.opponent_y;
    if (std::abs(offset) <= p.opponent_half_length) {
      o[0] = 2.0 * p.width - o[0];
      o[2] = -o[2];
      o[3] = Clamp(o[3] + p.opponent_spin * offset / p.opponent_half_length,
                   -p.vy_max, p.vy_max);
    } else {
      ++n.player_score;
      out.reward = 1.0;
      DuelPongServe(p, n);
    }
  }
  out.done = n.player_score >= p.rounds_to_win || n.opponent_score >= p.rounds_to_win;
  return out;
}

int DuelPongTrackingAction(const DuelPongParams& p,
                           const Eigen::Ref<const Eigen::VectorXd>& obs) {
  const double gap = obs[1] - obs[4];
  if (gap > p.player_speed / 2.0) return kPaddleUp;
  if (gap < -p.player_speed / 2.0) return kPaddleDown;
  return kPaddleHold;
}

DuelPongEnv::DuelPongEnv(DuelPongParams params) : params_(params) {
  params_.Validate();
  state_.obs = StateVector::Zero(5);
}

StateVector DuelPongEnv::Reset(std::uint64_t seed) {
  state_ = DuelPongState{};
  state_.obs = StateVector::Zero(5);
  state_.serve_seed = seed;
  state_.obs[4] = params_.height / 2.0;
  state_.opponent_y = params_.height / 2.0;
  DuelPongServe(params_, state_);
  return state_.obs;
}

void DuelPongEnv::SetState(const StateVector& s) {
  if (s.size() != 5) throw std::invalid_argument("duel pong state must be 5-D");
  const std::uint64_t seed = state_.serve_seed;
  state_ = DuelPongState{};
  state_.obs = s;
  state_.opponent_y = s[1];
  state_.serve_seed = seed;
}

StepResult DuelPongEnv::Step(const Action& a) {
  DuelPongTransition t = DuelPongStep(params_, state_, a.index());
  state_ = std::move(t.state);
  return {state_.obs, t.reward, t.done};
}

std::unique_ptr<Environment> DuelPongEnv::Clone() const {
  return std::make_unique<DuelPongEnv>(*this);
}

}  // namespace vpk
