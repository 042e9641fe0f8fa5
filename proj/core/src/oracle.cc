#include "vpk/oracle.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "vpk/cartpole.h"
#include "vpk/duelpong.h"
#include "vpk/ilqr.h"
#include "vpk/loaded_oracle.h"
#include "vpk/scripted_oracles.h"
#include "vpk/toypong.h"

namespace vpk {

std::vector<double> Oracle::QValues(const StateVector& s) const {
  const ActionSpace space = action_space();
  if (!space.is_discrete()) throw std::logic_error("QValues needs a discrete action space");
  std::vector<double> q(space.num_discrete);
  for (int a = 0; a < space.num_discrete; ++a) q[a] = QValue(s, Action::Discrete(a));
  return q;
}

double EllTilde(const Oracle& oracle, const StateVector& s) {
  const std::vector<double> q = oracle.QValues(s);
  const double chosen = q.at(oracle.Act(s).index());
  const double worst = *std::min_element(q.begin(), q.end());
  return chosen - worst;
}

int ArgMax(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("ArgMax of an empty list");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Policy AsPolicy(std::shared_ptr<const Oracle> oracle) {
  return [oracle](const StateVector& s) { return oracle->Act(s); };
}

double MaxEntQ(const StochasticPolicy& policy, const StateVector& s, int a) {
  const std::vector<double> probs = policy(s);
  if (a < 0 || a >= static_cast<int>(probs.size())) {
    throw std::out_of_range("action index outside the policy's support");
  }
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("action probabilities must sum to 1");
  }
  if (!(probs[a] > 0.0)) {
    throw std::domain_error("max-entropy Q undefined for a zero-probability action");
  }
  return std::log(probs[a]);
}

MaxEntOracle::MaxEntOracle(StochasticPolicy policy, int num_actions)
    : policy_(std::move(policy)), num_actions_(num_actions) {
  if (num_actions < 1) throw std::invalid_argument("MaxEntOracle needs actions");
}

Action MaxEntOracle::Act(const StateVector& s) const {
  return Action::Discrete(ArgMax(policy_(s)));
}

double MaxEntOracle::QValue(const StateVector& s, const Action& a) const {
  return MaxEntQ(policy_, s, a.index());
}

std::vector<double> MaxEntOracle::QValues(const StateVector& s) const {
  std::vector<double> q(num_actions_);
  for (int a = 0; a < num_actions_; ++a) q[a] = MaxEntQ(policy_, s, a);
  return q;
}

std::shared_ptr<const Oracle> MakeOracle(const std::string& spec,
                                         const Environment& env,
                                         const nlohmann::json& options) {
  const nlohmann::json opt = options.is_null() ? nlohmann::json::object() : options;
  const auto* cartpole = dynamic_cast<const CartPoleEnv*>(&env);
  const auto* toypong = dynamic_cast<const ToyPongEnv*>(&env);
  const auto* duelpong = dynamic_cast<const DuelPongEnv*>(&env);

  if (spec == "lqr") {
    if (!cartpole) throw std::invalid_argument("oracle 'lqr' needs the cartpole environment");
    return std::make_shared<CartPoleLqrOracle>(cartpole->params());
  }
  if (spec == "ilqr") {
    if (!cartpole) throw std::invalid_argument("oracle 'ilqr' needs the cartpole environment");
    IlqrConfig config = DefaultIlqrConfig();
    config.horizon = opt.value("horizon", config.horizon);
    config.iterations = opt.value("iterations", config.iterations);
    config.fallback_radius = opt.value("fallback_radius", config.fallback_radius);
    return std::make_shared<IlqrOracle>(cartpole->params(), config);
  }
  if (spec == "expert") {
    const int n_rollouts = opt.value("q_rollouts", 1);
    const std::uint64_t seed = opt.value("q_seed", std::uint64_t{0});
    if (toypong) {
      // An action only matters until the next paddle contact, which is at most
      // ToyPongHorizon steps away.
      const int horizon = opt.value("q_horizon", ToyPongHorizon(toypong->params()) + 1);
      return std::make_shared<ScriptedOracle>(
          std::shared_ptr<const Environment>(env.Clone()),
          ToyPongExpert(toypong->params()), horizon, n_rollouts, seed);
    }
    if (duelpong) {
      const int horizon = opt.value("q_horizon", 60);
      return std::make_shared<ScriptedOracle>(
          std::shared_ptr<const Environment>(env.Clone()),
          DuelPongExpert(duelpong->params()), horizon, n_rollouts, seed);
    }
    throw std::invalid_argument("oracle 'expert' needs toypong or duelpong");
  }
  if (!std::filesystem::exists(spec)) {
    throw std::runtime_error("oracle file not found: " + spec);
  }
  auto loaded = std::make_shared<LoadedOracle>(LoadedOracle::FromFile(spec));
  if (loaded->dim() != env.state_dim()) {
    throw std::invalid_argument("oracle file " + spec + ": dim does not match the environment");
  }
  return loaded;
}

}  // namespace vpk
