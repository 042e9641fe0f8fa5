#include "vpk/rollout.h"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vpk {

double Trajectory::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

Trajectory RolloutFrom(Environment& env, const Policy& policy, int max_steps) {
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  Trajectory traj;
  traj.states.push_back(env.state());
  for (int t = 0; t < max_steps; ++t) {
    const Action a = policy(traj.states.back());
    StepResult r = env.Step(a);
    try {
      RequireFinite(r.state, env.id() + " step " + std::to_string(t));
    } catch (const std::runtime_error& e) {
      std::ostringstream msg;
      msg << "rollout aborted: " << e.what() << " after action "
          << a.ToString();
      throw std::runtime_error(msg.str());
    }
    traj.actions.push_back(a);
    traj.rewards.push_back(r.reward);
    traj.states.push_back(std::move(r.state));
    if (r.done) {
      traj.terminated_early = true;
      break;
    }
  }
  return traj;
}

Trajectory Rollout(const Environment& env, const Policy& policy, int max_steps,
                   std::uint64_t seed) {
  auto instance = env.Clone();
  instance->Reset(seed);
  return RolloutFrom(*instance, policy, max_steps);
}

double MeanReward(const Environment& env, const Policy& policy, int n,
                  std::uint64_t seed, int max_steps) {
  if (n <= 0) throw std::invalid_argument("MeanReward needs n >= 1");
  const int steps = max_steps < 0 ? env.max_steps() : max_steps;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    total += Rollout(env, policy, steps, DeriveSeed(seed, i)).total_reward();
  }
  return total / n;
}

}  // namespace vpk
