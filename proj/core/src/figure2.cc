#include "vpk/figure2.h"

#include <stdexcept>

namespace vpk::figure2 {

TabularMdp Make(int k, double alpha) {
  if (k < 1) throw std::invalid_argument("figure2 MDP needs k >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("figure2 MDP needs alpha in (0, 1)");
  }
  const int horizon = 3 * (k + 1);
  const int end = End(k);
  TabularMdp mdp(2 * k + 3, 3, horizon, Chain(k, 0));

  for (int a = 0; a < 3; ++a) {
    mdp.set_transition(end, a, end, 1.0);
    mdp.set_transition(Tilde(k), a, end, 1.0);
    mdp.set_transition(Chain(k, -k), a, end, 1.0);
    mdp.set_transition(Chain(k, k), a, end, 1.0);
  }
  for (int i = -k + 1; i <= k - 1; ++i) {
    const int s = Chain(k, i);
    mdp.set_transition(s, kLeft, Chain(k, i - 1), 1.0);
    mdp.set_transition(s, kRight, Chain(k, i + 1), 1.0);
    mdp.set_transition(s, kDown, i == -(k - 1) ? Tilde(k) : end, 1.0);
  }
  mdp.set_reward(Tilde(k), horizon);
  mdp.set_reward(Chain(k, k), horizon - alpha);
  mdp.Validate();
  return mdp;
}

TabularPolicy OptimalPolicy(int k) {
  TabularPolicy pi = ConstantPolicy(k, kLeft);
  pi[Chain(k, -(k - 1))] = kDown;
  pi[Chain(k, k)] = kRight;
  return pi;
}

TabularPolicy ConstantPolicy(int k, Move move) {
  return TabularPolicy(2 * k + 3, move);
}

}  // namespace vpk::figure2
