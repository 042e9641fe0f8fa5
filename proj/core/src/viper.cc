#include "vpk/viper.h"

#include <sstream>
#include <stdexcept>

#include "vpk/rollout.h"

namespace vpk {

void ExtractionConfig::Validate() const {
  if (iterations < 1) throw std::invalid_argument("extraction needs iterations (N) >= 1");
  if (rollouts < 1) throw std::invalid_argument("extraction needs rollouts (M) >= 1");
  if (eval_rollouts < 1) throw std::invalid_argument("extraction needs eval_rollouts >= 1");
  if (max_steps < -1) throw std::invalid_argument("extraction max_steps must be >= -1");
}

nlohmann::json ExtractionConfig::ToJson() const {
  return {{"iterations", iterations},
          {"rollouts", rollouts},
          {"resample_size", resample_size},
          {"tree", tree.ToJson()},
          {"eval_rollouts", eval_rollouts},
          {"max_steps", max_steps},
          {"seed", seed},
          {"weighted", weighted}};
}

ExtractionConfig ExtractionConfig::FromJson(const nlohmann::json& j) {
  ExtractionConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.rollouts = j.value("rollouts", c.rollouts);
  c.resample_size = j.value("resample_size", c.resample_size);
  if (j.contains("tree")) c.tree = TreeConfig::FromJson(j.at("tree"));
  c.eval_rollouts = j.value("eval_rollouts", c.eval_rollouts);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.seed = j.value("seed", c.seed);
  c.weighted = j.value("weighted", c.weighted);
  c.Validate();
  return c;
}

Policy TreePolicy(std::shared_ptr<const DecisionTree> tree) {
  return [tree](const StateVector& s) { return tree->Predict(s); };
}

namespace {

constexpr std::uint64_t kResampleStream = 1u << 20;
constexpr std::uint64_t kEvalStream = 1u << 21;

DecisionTree Train(const std::vector<DatasetEntry>& samples, bool discrete,
                   const TreeConfig& base) {
  std::vector<StateVector> states;
  states.reserve(samples.size());
  for (const DatasetEntry& e : samples) states.push_back(e.state);
  TreeConfig config = base;
  if (discrete) {
    config.leaf_kind = LeafKind::kDiscrete;
    std::vector<int> labels;
    labels.reserve(samples.size());
    for (const DatasetEntry& e : samples) labels.push_back(e.action.index());
    return FitClassifier(states, labels, config);
  }
  config.leaf_kind = LeafKind::kLinear;
  std::vector<double> targets;
  targets.reserve(samples.size());
  for (const DatasetEntry& e : samples) targets.push_back(e.action.value());
  return FitLinearTree(states, targets, config);
}

ExtractionResult RunLoop(const Environment& env, const Oracle& oracle,
                         const ExtractionConfig& config) {
  config.Validate();
  const bool discrete = oracle.action_space().is_discrete();
  const bool weighted = config.weighted && discrete;
  const int max_steps = config.max_steps < 0 ? env.max_steps() : config.max_steps;
  const std::uint64_t eval_seed = DeriveSeed(config.seed, kEvalStream);

  ExtractionResult result;
  std::vector<double> rewards;
  std::vector<int> node_counts;
  std::shared_ptr<const DecisionTree> previous;
  const Policy oracle_policy = [&oracle](const StateVector& s) { return oracle.Act(s); };

  for (int i = 1; i <= config.iterations; ++i) {
    const Policy sampler = i == 1 ? oracle_policy : TreePolicy(previous);
    const std::uint64_t iter_seed = DeriveSeed(config.seed, i);
    for (int m = 0; m < config.rollouts; ++m) {
      const Trajectory traj = Rollout(env, sampler, max_steps, DeriveSeed(iter_seed, m));
      for (const StateVector& s : traj.states) {
        DatasetEntry entry{s, oracle.Act(s), 1.0};
        if (weighted) entry.weight = EllTilde(oracle, s);
        result.dataset.Add(std::move(entry));
      }
    }

    const std::size_t size =
        config.resample_size > 0 ? config.resample_size : result.dataset.size();
    std::vector<DatasetEntry> samples;
    if (weighted && result.dataset.total_weight() > 0.0) {
      samples = Resample(result.dataset, size, DeriveSeed(config.seed, kResampleStream + i));
    } else {
      if (weighted) {
        std::ostringstream msg;
        msg << "iteration " << i << ": all ell~ weights are zero; resampling uniformly";
        result.warnings.push_back(msg.str());
      }
      std::vector<double> ones(result.dataset.size(), 1.0);
      for (std::size_t k : ResampleIndices(ones, size,
                                           DeriveSeed(config.seed, kResampleStream + i))) {
        samples.push_back(result.dataset.entries()[k]);
      }
    }

    auto tree = std::make_shared<const DecisionTree>(Train(samples, discrete, config.tree));
    const double reward =
        MeanReward(env, TreePolicy(tree), config.eval_rollouts, eval_seed, max_steps);
    result.report.push_back({i, result.dataset.size(), tree->node_count(), reward});
    rewards.push_back(reward);
    node_counts.push_back(tree->node_count());
    result.candidates.push_back(*tree);
    previous = tree;
  }
  result.best_index = SelectBestIndex(rewards, node_counts);
  result.best = result.candidates[result.best_index];
  return result;
}

}  // namespace

ExtractionResult Viper(const Environment& env, const Oracle& oracle, ExtractionConfig config) {
  config.weighted = true;
  return RunLoop(env, oracle, config);
}

ExtractionResult Dagger(const Environment& env, const Oracle& oracle, ExtractionConfig config) {
  config.weighted = false;
  return RunLoop(env, oracle, config);
}

int SelectBestIndex(const std::vector<double>& mean_rewards,
                    const std::vector<int>& node_counts) {
  if (mean_rewards.empty() || mean_rewards.size() != node_counts.size()) {
    throw std::invalid_argument("SelectBestIndex needs matching non-empty lists");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(mean_rewards.size()); ++i) {
    if (mean_rewards[i] > mean_rewards[best] ||
        (mean_rewards[i] == mean_rewards[best] && node_counts[i] < node_counts[best])) {
      best = i;
    }
  }
  return best;
}

int SelectBest(const std::vector<DecisionTree>& candidates, const Environment& env,
               int eval_rollouts, std::uint64_t seed, int max_steps) {
  if (candidates.empty()) throw std::invalid_argument("SelectBest needs candidates");
  std::vector<double> rewards;
  std::vector<int> nodes;
  for (const DecisionTree& tree : candidates) {
    rewards.push_back(MeanReward(env, TreePolicy(std::make_shared<const DecisionTree>(tree)),
                                 eval_rollouts, seed, max_steps));
    nodes.push_back(tree.node_count());
  }
  return SelectBestIndex(rewards, nodes);
}

std::string ReportCsv(const std::vector<IterationReport>& report) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,dataset_size,tree_nodes,mean_eval_reward\n";
  for (const IterationReport& r : report) {
    out << r.iteration << ',' << r.dataset_size << ',' << r.tree_nodes << ','
        << r.mean_eval_reward << '\n';
  }
  return out.str();
}

}  // namespace vpk
