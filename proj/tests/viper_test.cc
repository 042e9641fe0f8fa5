#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "vpk/cartpole.h"
#include "vpk/dataset.h"
#include "vpk/oracle.h"
#include "vpk/rollout.h"
#include "vpk/toypong.h"
#include "vpk/viper.h"

namespace vpk {
namespace {

// Wraps an oracle and reports the same gap between its action and every
// other action, so that ell~ is 1 everywhere.
class FlatGapOracle final : public Oracle {
 public:
  explicit FlatGapOracle(std::shared_ptr<const Oracle> inner) : inner_(std::move(inner)) {}
  ActionSpace action_space() const override { return inner_->action_space(); }
  Action Act(const StateVector& s) const override { return inner_->Act(s); }
  double QValue(const StateVector& s, const Action& a) const override {
    return a == Act(s) ? 1.0 : 0.0;
  }

 private:
  std::shared_ptr<const Oracle> inner_;
};

TEST(ResampleTest, FrequenciesFollowWeights) {
  const std::vector<std::size_t> idx = ResampleIndices({1.0, 3.0}, 100000, 17);
  double ones = 0;
  for (std::size_t i : idx) ones += i == 1 ? 1 : 0;
  EXPECT_NEAR(ones / idx.size(), 0.75, 0.01);
}

TEST(ResampleTest, ZeroWeightIsNeverDrawn) {
  for (std::size_t i : ResampleIndices({0.0, 2.0, 0.0, 1.0}, 20000, 3)) {
    EXPECT_TRUE(i == 1 || i == 3);
  }
}

TEST(ResampleTest, UniformWeightsAreScaleFree) {
  EXPECT_EQ(ResampleIndices({1, 1, 1, 1, 1}, 500, 9), ResampleIndices({7, 7, 7, 7, 7}, 500, 9));
}

TEST(ResampleTest, RejectsDegenerateInput) {
  EXPECT_THROW(ResampleIndices({1.0}, 0, 0), std::invalid_argument);
  EXPECT_THROW(ResampleIndices({}, 5, 0), std::invalid_argument);
  EXPECT_THROW(ResampleIndices({0.0, 0.0}, 5, 0), std::invalid_argument);
}

TEST(AggregatedDatasetTest, RejectsBadWeightsAndDimensions) {
  AggregatedDataset d;
  d.Add({Eigen::Vector2d::Zero(), Action::Discrete(0), 2.0});
  EXPECT_THROW(d.Add({Eigen::Vector2d::Zero(), Action::Discrete(0), -1.0}), std::invalid_argument);
  EXPECT_THROW(d.Add({Eigen::Vector2d::Zero(), Action::Discrete(0), NAN}), std::invalid_argument);
  EXPECT_THROW(d.Add({Eigen::Vector3d::Zero(), Action::Discrete(0), 1.0}), std::invalid_argument);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.total_weight(), 2.0);
}

TEST(ExtractionConfigTest, ValidateAndJson) {
  ExtractionConfig c;
  c.iterations = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.iterations = 3;
  c.rollouts = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c.rollouts = 7;
  c.resample_size = 123;
  c.tree.max_depth = 5;
  c.seed = 42;
  const ExtractionConfig back = ExtractionConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.iterations, 3);
  EXPECT_EQ(back.rollouts, 7);
  EXPECT_EQ(back.resample_size, 123u);
  EXPECT_EQ(back.tree.max_depth, 5);
  EXPECT_EQ(back.seed, 42u);
}

TEST(SelectBestTest, TieBreaks) {
  EXPECT_EQ(SelectBestIndex({1.0, 3.0, 2.0}, {1, 1, 1}), 1);
  EXPECT_EQ(SelectBestIndex({3.0, 3.0, 3.0}, {9, 5, 5}), 1);
  EXPECT_EQ(SelectBestIndex({2.0, 2.0}, {3, 3}), 0);
}

TEST(ViperTest, MatchesDaggerWhenEllTildeIsUniform) {
  CartPoleEnv env;
  const FlatGapOracle oracle(MakeOracle("lqr", env));
  ExtractionConfig cfg;
  cfg.iterations = 3;
  cfg.rollouts = 3;
  cfg.eval_rollouts = 3;
  cfg.tree.max_depth = 3;
  cfg.seed = 5;
  const ExtractionResult v = Viper(env, oracle, cfg);
  const ExtractionResult d = Dagger(env, oracle, cfg);
  ASSERT_EQ(v.candidates.size(), d.candidates.size());
  for (std::size_t i = 0; i < v.candidates.size(); ++i) EXPECT_EQ(v.candidates[i], d.candidates[i]);
  EXPECT_EQ(v.best_index, d.best_index);
}

TEST(ViperTest, ReportAndSelectionAreConsistent) {
  CartPoleEnv env;
  auto oracle = MakeOracle("lqr", env);
  ExtractionConfig cfg;
  cfg.iterations = 4;
  cfg.rollouts = 4;
  cfg.eval_rollouts = 5;
  cfg.tree.max_depth = 3;
  cfg.seed = 1;
  const ExtractionResult r = Viper(env, *oracle, cfg);
  ASSERT_EQ(r.candidates.size(), 4u);
  ASSERT_EQ(r.report.size(), 4u);
  double best = -1;
  for (std::size_t i = 0; i < r.report.size(); ++i) {
    EXPECT_EQ(r.report[i].iteration, static_cast<int>(i) + 1);
    EXPECT_EQ(r.report[i].tree_nodes, r.candidates[i].node_count());
    if (i > 0) EXPECT_GT(r.report[i].dataset_size, r.report[i - 1].dataset_size);
    best = std::max(best, r.report[i].mean_eval_reward);
  }
  EXPECT_EQ(r.report[r.best_index].mean_eval_reward, best);
  EXPECT_EQ(r.best, r.candidates[r.best_index]);
  EXPECT_EQ(r.dataset.size(), r.report.back().dataset_size);
  // Deterministic under a fixed seed.
  EXPECT_EQ(Viper(env, *oracle, cfg).best, r.best);
  EXPECT_EQ(ReportCsv(r.report).rfind("iteration,dataset_size,tree_nodes,mean_eval_reward\n", 0), 0u);
}

TEST(ViperTest, WeightsAreEllTilde) {
  ToyPongEnv env;
  auto oracle = MakeOracle("expert", env);
  ExtractionConfig cfg;
  cfg.iterations = 1;
  cfg.rollouts = 1;
  cfg.eval_rollouts = 1;
  cfg.seed = 2;
  const ExtractionResult r = Viper(env, *oracle, cfg);
  for (const DatasetEntry& e : r.dataset.entries()) {
    EXPECT_EQ(e.weight, EllTilde(*oracle, e.state));
    EXPECT_EQ(e.action, oracle->Act(e.state));
  }
}

TEST(BehavioralCloningTest, OneIterationOnOracleData) {
  // With a single iteration both loops only ever see oracle trajectories.
  CartPoleEnv env;
  auto oracle = MakeOracle("lqr", env);
  ExtractionConfig cfg;
  cfg.iterations = 1;
  cfg.rollouts = 5;
  cfg.eval_rollouts = 5;
  cfg.tree.max_depth = 1;
  const ExtractionResult r = Dagger(env, *oracle, cfg);
  ASSERT_EQ(r.best.node_count(), 3);
  EXPECT_EQ(r.best.nodes()[0].feature, kPoleOmega);
}

}  // namespace
}  // namespace vpk
