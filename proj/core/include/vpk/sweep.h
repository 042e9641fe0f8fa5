#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpk/environment.h"
#include "vpk/oracle.h"
#include "vpk/viper.h"

namespace vpk {

/// One extraction run of a tree-size sweep.
struct SweepPoint {
  std::string algorithm;  // "viper" or "dagger"
  std::uint64_t seed = 0;
  int max_depth = 0;
  int nodes = 0;
  /// Mean reward of the selected tree over the sweep's evaluation rollouts.
  double mean_reward = 0.0;
};

struct SweepConfig {
  /// Every field except seed and tree.max_depth is shared by all runs.
  ExtractionConfig extraction;
  std::vector<int> depths;
  std::vector<std::uint64_t> seeds;
  bool run_viper = true;
  bool run_dagger = true;
  int eval_rollouts = 20;
  std::uint64_t eval_seed = 1000;
  /// Throws std::invalid_argument for empty depth or seed lists or when
  /// neither algorithm is selected.
  void Validate() const;
};

/// Runs VIPER and/or DAgger for each (seed, depth) pair in seed-major,
/// depth-ascending order.
std::vector<SweepPoint> RunSweep(const Environment& env, const Oracle& oracle,
                                 const SweepConfig& config);

/// CSV with header "algorithm,seed,max_depth,nodes,mean_reward,best_reward_so_far";
/// the last column is the running maximum over depths for that algorithm and seed.
std::string SweepCsv(const std::vector<SweepPoint>& points);

/// Median over seeds of the smallest tree reaching a reward threshold.
struct ThresholdRow {
  double threshold = 0.0;
  double viper_median_nodes = 0.0;
  double dagger_median_nodes = 0.0;
};

/// For each threshold reached by every seed of both algorithms, the median
/// (over seeds) of the minimal node count among runs with mean reward >=
/// threshold. Thresholds are the integers between the lowest and highest
/// reward in the sweep.
std::vector<ThresholdRow> CompareAtThresholds(const std::vector<SweepPoint>& points);

/// CSV with header "threshold,viper_median_nodes,dagger_median_nodes".
std::string ThresholdCsv(const std::vector<ThresholdRow>& rows);

}  // namespace vpk
