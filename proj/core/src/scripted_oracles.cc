#include "vpk/scripted_oracles.h"

#include <algorithm>
#include <stdexcept>

#include "vpk/rollout.h"

namespace vpk {

double McQEstimate(const Environment& env, const Policy& expert,
                   const StateVector& s, const Action& a, int n_rollouts,
                   int horizon, std::uint64_t seed) {
  if (horizon <= 0) throw std::invalid_argument("Q estimate horizon must be positive");
  if (n_rollouts <= 0) throw std::invalid_argument("Q estimate needs n_rollouts >= 1");
  double total = 0.0;
  std::unique_ptr<Environment> sim = env.Clone();
  for (int i = 0; i < n_rollouts; ++i) {
    sim->Reset(DeriveSeed(seed, i));
    sim->SetState(s);
    StepResult r = sim->Step(a);
    double ret = r.reward;
    for (int t = 1; t < horizon && !r.done; ++t) {
      r = sim->Step(expert(r.state));
      ret += r.reward;
    }
    total += ret;
  }
  return total / n_rollouts;
}

ScriptedOracle::ScriptedOracle(std::shared_ptr<const Environment> env,
                               Policy expert, int horizon, int n_rollouts,
                               std::uint64_t seed)
    : env_(std::move(env)),
      expert_(std::move(expert)),
      horizon_(horizon),
      n_rollouts_(n_rollouts),
      seed_(seed) {
  if (horizon_ <= 0 || n_rollouts_ <= 0) {
    throw std::invalid_argument("ScriptedOracle needs positive horizon and rollouts");
  }
}

double ScriptedOracle::QValue(const StateVector& s, const Action& a) const {
  return McQEstimate(*env_, expert_, s, a, n_rollouts_, horizon_, seed_);
}

double ToyPongLandingX(const ToyPongParams& params, const StateVector& s) {
  StateVector ball = s;
  // The ball needs at most 2 y_max / v_min steps to come down; the cap guards
  // against states with vy = 0.
  const int cap = 4 * ToyPongHorizon(params) + 4;
  for (int t = 0; t < cap; ++t) {
    if (ball[kBallY] + ball[kBallVy] <= 0.0) {
      return ToyPongStep(params, ball, kPaddleStay).state[kBallX];
    }
    ball = ToyPongStep(params, ball, kPaddleStay).state;
  }
  return ball[kBallX];
}

Policy ToyPongExpert(const ToyPongParams& params) {
  return [params](const StateVector& s) {
    const double target = ToyPongLandingX(params, s);
    const double gap = target - s[kPaddleX];
    const double band = params.paddle_speed / 2.0;
    if (gap > band) return Action::Discrete(kPaddleRight);
    if (gap < -band) return Action::Discrete(kPaddleLeft);
    return Action::Discrete(kPaddleStay);
  };
}

Policy DuelPongExpert(const DuelPongParams& params) {
  return [params](const StateVector& s) {
    return Action::Discrete(DuelPongTrackingAction(params, s));
  };
}

CartPoleLqrOracle::CartPoleLqrOracle(CartPoleParams params) : params_(params) {
  params_.Validate();
  const LinearModel lin = CartPoleLinearize(params_).discrete;
  const Eigen::MatrixXd Qc = Eigen::Vector4d(1.0, 1.0, 10.0, 1.0).asDiagonal();
  lqr_ = LqrSolve(lin.A, lin.B, Qc, Eigen::MatrixXd::Constant(1, 1, 0.1),
                  LqrMode::kDiscrete);
}

ActionSpace CartPoleLqrOracle::action_space() const {
  return params_.continuous_actions
             ? ActionSpace::Continuous(-params_.action_limit, params_.action_limit)
             : ActionSpace::Discrete(2);
}

Action CartPoleLqrOracle::Act(const StateVector& s) const {
  if (params_.continuous_actions) {
    const double u = -(lqr_.K * s)(0);
    return Action::Continuous(std::clamp(u, -params_.action_limit, params_.action_limit));
  }
  return Action::Discrete(ArgMax(QValues(s)));
}

double CartPoleLqrOracle::QValue(const StateVector& s, const Action& a) const {
  const StateVector next = CartPoleStep(params_, s, CartPoleForce(params_, a));
  return -next.dot(lqr_.P * next);
}

}  // namespace vpk
