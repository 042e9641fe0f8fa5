#include "vpk/dynamic_programming.h"

#include <algorithm>
#include <stdexcept>

namespace vpk {
namespace {

void CheckPolicy(const TabularMdp& mdp, const TabularPolicy& policy) {
  if (static_cast<int>(policy.size()) != mdp.num_states()) {
    throw std::invalid_argument("policy must define an action for every state");
  }
  for (int a : policy) {
    if (a < 0 || a >= mdp.num_actions()) {
      throw std::invalid_argument("policy action out of range");
    }
  }
}

}  // namespace

std::vector<double> ValueTables::AverageDistribution() const {
  std::vector<double> avg(d.empty() ? 0 : d[0].size(), 0.0);
  for (int t = 0; t < horizon; ++t) {
    for (std::size_t s = 0; s < avg.size(); ++s) avg[s] += d[t][s];
  }
  for (double& v : avg) v /= horizon;
  return avg;
}

ValueTables DpEvaluate(const TabularMdp& mdp, const TabularPolicy& policy) {
  CheckPolicy(mdp, policy);
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  const int horizon = mdp.horizon();

  ValueTables out;
  out.horizon = horizon;
  out.V.assign(horizon + 1, std::vector<double>(n, 0.0));
  out.Q.assign(horizon, std::vector<std::vector<double>>(
                            n, std::vector<double>(m, 0.0)));
  out.d.assign(horizon + 1, std::vector<double>(n, 0.0));

  for (int t = horizon - 1; t >= 0; --t) {
    const auto& next_v = out.V[t + 1];
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < m; ++a) {
        double future = 0.0;
        for (int s2 = 0; s2 < n; ++s2) {
          const double p = mdp.transition(s, a, s2);
          if (p != 0.0) future += p * next_v[s2];
        }
        out.Q[t][s][a] = mdp.reward(s) + future;
      }
      out.V[t][s] = out.Q[t][s][policy[s]];
    }
  }

  out.d[0][mdp.initial_state()] = 1.0;
  for (int t = 1; t <= horizon; ++t) {
    for (int s = 0; s < n; ++s) {
      const double mass = out.d[t - 1][s];
      if (mass == 0.0) continue;
      for (int s2 = 0; s2 < n; ++s2) {
        const double p = mdp.transition(s, policy[s], s2);
        if (p != 0.0) out.d[t][s2] += mass * p;
      }
    }
  }
  return out;
}

double ZeroOneLoss(const TabularMdp& mdp, const TabularPolicy& policy,
                   const TabularPolicy& oracle) {
  CheckPolicy(mdp, oracle);
  const ValueTables tables = DpEvaluate(mdp, policy);
  const std::vector<double> dist = tables.AverageDistribution();
  double loss = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (mdp.IsActionFree(s)) continue;
    if (policy[s] != oracle[s]) loss += dist[s];
  }
  return loss;
}

double QDaggerLoss(const TabularMdp& mdp, const TabularPolicy& policy,
                   const ValueTables& star) {
  const ValueTables mine = DpEvaluate(mdp, policy);
  double total = 0.0;
  for (int t = 0; t < mdp.horizon(); ++t) {
    for (int s = 0; s < mdp.num_states(); ++s) {
      const double mass = mine.d[t][s];
      if (mass == 0.0 || mdp.IsActionFree(s)) continue;
      total += mass * (star.V[t][s] - star.Q[t][s][policy[s]]);
    }
  }
  return total / mdp.horizon();
}

double QDaggerLoss(const TabularMdp& mdp, const TabularPolicy& policy,
                   const TabularPolicy& oracle) {
  return QDaggerLoss(mdp, policy, DpEvaluate(mdp, oracle));
}

double EllTilde(const TabularMdp& mdp, const ValueTables& star, int t,
                int s) {
  if (t < 0 || t >= mdp.horizon() || s < 0 || s >= mdp.num_states()) {
    throw std::out_of_range("EllTilde (t, s) out of range");
  }
  if (mdp.IsActionFree(s)) return 0.0;
  const auto& q = star.Q[t][s];
  const double worst = *std::min_element(q.begin(), q.end());
  return star.V[t][s] - worst;
}

}  // namespace vpk
