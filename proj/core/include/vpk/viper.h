#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vpk/dataset.h"
#include "vpk/decision_tree.h"
#include "vpk/environment.h"
#include "vpk/oracle.h"

namespace vpk {

struct ExtractionConfig {
  /// N: number of iterations (trees trained).
  int iterations = 10;
  /// M: trajectories sampled per iteration.
  int rollouts = 10;
  /// Resample size; 0 means the size of the aggregate.
  std::size_t resample_size = 0;
  TreeConfig tree;
  int eval_rollouts = 30;
  /// Episode cap for sampling and evaluation; -1 uses the environment's.
  int max_steps = -1;
  std::uint64_t seed = 0;
  /// Weight samples by ell~ (VIPER) or uniformly (DAgger).
  bool weighted = true;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ExtractionConfig FromJson(const nlohmann::json& j);
};

struct IterationReport {
  int iteration = 0;
  std::size_t dataset_size = 0;
  int tree_nodes = 0;
  double mean_eval_reward = 0.0;
};

struct ExtractionResult {
  DecisionTree best;
  /// 0-based index into `candidates`.
  int best_index = 0;
  std::vector<DecisionTree> candidates;
  std::vector<IterationReport> report;
  AggregatedDataset dataset;
  std::vector<std::string> warnings;
};

/// Policy that queries a tree.
Policy TreePolicy(std::shared_ptr<const DecisionTree> tree);

/// The VIPER loop. Iteration 1 samples trajectories with the oracle, later
/// iterations with the previous tree. Every visited state (terminal ones
/// included) is labelled with the oracle's action and weighted by ell~.
/// Continuous action spaces train linear-leaf trees with unit weights.
ExtractionResult Viper(const Environment& env, const Oracle& oracle,
                       ExtractionConfig config);

/// The same loop with unit weights.
ExtractionResult Dagger(const Environment& env, const Oracle& oracle,
                        ExtractionConfig config);

/// Index of the candidate with the highest mean reward; ties go to fewer
/// nodes, then the earlier candidate.
int SelectBestIndex(const std::vector<double>& mean_rewards,
                    const std::vector<int>& node_counts);

/// Evaluates every candidate with `eval_rollouts` rollouts (the same seeds
/// for each) and returns the index chosen by SelectBestIndex.
int SelectBest(const std::vector<DecisionTree>& candidates,
               const Environment& env, int eval_rollouts, std::uint64_t seed,
               int max_steps = -1);

/// CSV with header "iteration,dataset_size,tree_nodes,mean_eval_reward".
std::string ReportCsv(const std::vector<IterationReport>& report);

}  // namespace vpk
