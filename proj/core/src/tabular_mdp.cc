#include "vpk/tabular_mdp.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vpk {

TabularMdp::TabularMdp(int num_states, int num_actions, int horizon,
                       int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      initial_state_(initial_state) {
  if (num_states < 1 || num_actions < 1) {
    throw std::invalid_argument("TabularMdp needs >= 1 state and action");
  }
  if (horizon < 1) throw std::invalid_argument("TabularMdp horizon must be >= 1");
  if (initial_state < 0 || initial_state >= num_states) {
    throw std::invalid_argument("TabularMdp initial_state out of range");
  }
  p_.assign(static_cast<std::size_t>(num_states) * num_actions * num_states,
            0.0);
  rewards_.assign(num_states, 0.0);
}

void TabularMdp::set_transition(int s, int a, int next, double prob) {
  if (s < 0 || s >= num_states_ || next < 0 || next >= num_states_ || a < 0 ||
      a >= num_actions_) {
    throw std::out_of_range("transition index out of range");
  }
  p_[Index(s, a, next)] = prob;
}

void TabularMdp::set_reward(int s, double r) {
  if (s < 0 || s >= num_states_) throw std::out_of_range("reward index");
  rewards_[s] = r;
}

bool TabularMdp::IsActionFree(int s) const {
  for (int a = 0; a < num_actions_; ++a) {
    if (transition(s, a, s) != 1.0) return false;
  }
  return true;
}

void TabularMdp::Validate() const {
  for (int s = 0; s < num_states_; ++s) {
    if (!std::isfinite(rewards_[s])) {
      throw std::invalid_argument("reward of state " + std::to_string(s) +
                                  " is not finite");
    }
    for (int a = 0; a < num_actions_; ++a) {
      double sum = 0.0;
      for (int n = 0; n < num_states_; ++n) {
        const double p = transition(s, a, n);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw std::invalid_argument("probability outside [0,1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "transition row (" << s << "," << a << ") sums to " << sum;
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

nlohmann::json TabularMdp::ToJson() const {
  nlohmann::json j;
  j["num_states"] = num_states_;
  j["num_actions"] = num_actions_;
  j["horizon"] = horizon_;
  j["initial_state"] = initial_state_;
  auto transitions = nlohmann::json::array();
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      for (int n = 0; n < num_states_; ++n) {
        const double p = transition(s, a, n);
        if (p != 0.0) transitions.push_back({s, a, n, p});
      }
    }
  }
  j["transitions"] = std::move(transitions);
  j["rewards"] = rewards_;
  return j;
}

TabularMdp TabularMdp::FromJson(const nlohmann::json& j) {
  for (const char* key : {"num_states", "num_actions", "horizon",
                          "initial_state", "transitions", "rewards"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("tabular MDP missing field '") +
                                  key + "'");
    }
  }
  TabularMdp mdp(j.at("num_states").get<int>(), j.at("num_actions").get<int>(),
                 j.at("horizon").get<int>(), j.at("initial_state").get<int>());
  for (const auto& row : j.at("transitions")) {
    if (!row.is_array() || row.size() != 4) {
      throw std::invalid_argument("transitions entries must be [s,a,s',p]");
    }
    mdp.set_transition(row[0].get<int>(), row[1].get<int>(), row[2].get<int>(),
                       row[3].get<double>());
  }
  const auto& rewards = j.at("rewards");
  if (static_cast<int>(rewards.size()) != mdp.num_states()) {
    throw std::invalid_argument("rewards length must equal num_states");
  }
  for (int s = 0; s < mdp.num_states(); ++s) {
    mdp.set_reward(s, rewards[s].get<double>());
  }
  mdp.Validate();
  return mdp;
}

TabularEnvironment::TabularEnvironment(std::shared_ptr<const TabularMdp> mdp,
                                       std::string id)
    : mdp_(std::move(mdp)), id_(std::move(id)), state_(1) {
  state_[0] = mdp_->initial_state();
}

ActionSpace TabularEnvironment::action_space() const {
  return ActionSpace::Discrete(mdp_->num_actions());
}

StateVector TabularEnvironment::Reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_[0] = mdp_->initial_state();
  return state_;
}

void TabularEnvironment::SetState(const StateVector& s) {
  if (s.size() != 1) throw std::invalid_argument("tabular state must be 1-D");
  const int idx = static_cast<int>(s[0]);
  if (idx < 0 || idx >= mdp_->num_states() || idx != s[0]) {
    throw std::invalid_argument("tabular state index out of range");
  }
  state_[0] = idx;
}

StepResult TabularEnvironment::Step(const Action& a) {
  const int s = static_cast<int>(state_[0]);
  const int action = a.index();
  if (action >= mdp_->num_actions()) {
    throw std::invalid_argument("tabular action out of range");
  }
  const double u = Uniform01(rng_);
  double acc = 0.0;
  int next = -1;
  int last_positive = s;
  for (int n = 0; n < mdp_->num_states(); ++n) {
    const double p = mdp_->transition(s, action, n);
    if (p <= 0.0) continue;
    last_positive = n;
    acc += p;
    if (u < acc) {
      next = n;
      break;
    }
  }
  if (next < 0) next = last_positive;
  StepResult r;
  r.reward = mdp_->reward(s);
  state_[0] = next;
  r.state = state_;
  r.done = false;
  return r;
}

std::unique_ptr<Environment> TabularEnvironment::Clone() const {
  return std::make_unique<TabularEnvironment>(*this);
}

Policy AsPolicy(const TabularPolicy& policy) {
  return [policy](const StateVector& s) {
    return Action::Discrete(policy.at(static_cast<std::size_t>(s[0])));
  };
}

}  // namespace vpk
