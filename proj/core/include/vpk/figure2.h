#pragma once

#include "vpk/tabular_mdp.h"

namespace vpk {

/// The chain MDP with a single critical state. Layout for parameter k:
///   indices 0..2k  : chain states s_{-k}..s_k (index i + k for s_i),
///   index 2k+1     : s~ (reward T),
///   index 2k+2     : s_end (absorbing, no actions).
/// Actions are left (0), right (1), down (2); down is available only at
/// s_{-(k-1)}; unavailable actions lead to s_end. Horizon T = 3(k+1),
/// R(s_k) = T - alpha.
namespace figure2 {

enum Move { kLeft = 0, kRight = 1, kDown = 2 };

inline int Chain(int k, int i) { return i + k; }
inline int Tilde(int k) { return 2 * k + 1; }
inline int End(int k) { return 2 * k + 2; }

/// Throws std::invalid_argument unless k >= 1 and alpha in (0, 1).
TabularMdp Make(int k, double alpha);

/// down at s_{-(k-1)}, right at s_k, left elsewhere.
TabularPolicy OptimalPolicy(int k);
TabularPolicy ConstantPolicy(int k, Move move);

}  // namespace figure2
}  // namespace vpk
