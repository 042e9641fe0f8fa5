#pragma once

#include <cstdint>

#include "vpk/tabular_mdp.h"
#include "vpk/types.h"

namespace vpk::testing {

/// Random finite-horizon MDP with dense random transitions, rewards in
/// [-1, 1], and a couple of action-free absorbing states mixed in.
inline TabularMdp RandomMdp(std::uint64_t seed, int num_states, int num_actions, int horizon) {
  Rng rng(seed);
  TabularMdp mdp(num_states, num_actions, horizon, 0);
  for (int s = 0; s < num_states; ++s) {
    mdp.set_reward(s, UniformIn(rng, -1.0, 1.0));
    const bool absorbing = s == num_states - 1;
    for (int a = 0; a < num_actions; ++a) {
      if (absorbing) {
        mdp.set_transition(s, a, s, 1.0);
        continue;
      }
      std::vector<double> w(num_states);
      double total = 0.0;
      for (double& x : w) total += x = Uniform01(rng) < 0.5 ? Uniform01(rng) : 0.0;
      if (total == 0.0) {
        w[0] = total = 1.0;
      }
      for (int next = 0; next < num_states; ++next) mdp.set_transition(s, a, next, w[next] / total);
    }
  }
  return mdp;
}

inline TabularPolicy RandomPolicy(std::uint64_t seed, int num_states, int num_actions) {
  Rng rng(seed);
  TabularPolicy p(num_states);
  for (int& a : p) a = static_cast<int>(Uniform01(rng) * num_actions);
  return p;
}

}  // namespace vpk::testing
