#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "vpk/decision_tree.h"
#include "vpk/robustness.h"
#include "vpk/types.h"

namespace vpk {
namespace {

DecisionTree RandomTree(std::uint64_t seed, int dim, int depth) {
  Rng rng(seed);
  std::vector<StateVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 300; ++i) {
    Eigen::VectorXd s(dim);
    for (int k = 0; k < dim; ++k) s[k] = std::round(UniformIn(rng, -8, 8)) / 4.0;
    xs.push_back(s);
    ys.push_back(static_cast<int>(rng() % 3));
  }
  TreeConfig cfg;
  cfg.max_depth = depth;
  return FitClassifier(xs, ys, cfg);
}

// Brute force: the smallest max-norm radius at which some grid point gets a
// different action. Grid points lie on multiples of `h` relative to s0.
double GridEpsilon(const DecisionTree& tree, const Eigen::Vector2d& s0, double h, int n) {
  const int a0 = tree.Predict(s0).index();
  double best = std::numeric_limits<double>::infinity();
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const Eigen::Vector2d s = s0 + h * Eigen::Vector2d(i, j);
      if (tree.Predict(s).index() != a0) best = std::min(best, (s - s0).lpNorm<Eigen::Infinity>());
    }
  }
  return best;
}

TEST(LeafDistanceTest, PerCoordinateGap) {
  LeafBox box{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2)};
  EXPECT_EQ(LeafLinfDistance(Eigen::Vector2d(0.5, 1), box), 0.0);
  EXPECT_EQ(LeafLinfDistance(Eigen::Vector2d(-3, 1), box), 3.0);
  EXPECT_EQ(LeafLinfDistance(Eigen::Vector2d(2, 5), box), 3.0);
  box.upper[1] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(LeafLinfDistance(Eigen::Vector2d(0.5, 100), box), 0.0);
}

TEST(RobustnessTest, ConstantTreeIsInfinitelyRobust) {
  const RobustnessResult r = EpsilonRobustness(DecisionTree::ConstantLeaf(3, 1), Eigen::Vector3d::Zero());
  EXPECT_TRUE(std::isinf(r.epsilon));
  EXPECT_FALSE(r.witness_leaf.has_value());
}

TEST(RobustnessTest, MatchesGridSearch) {
  // Thresholds are multiples of 1/8 and s0 sits on a 1/64 grid, so the
  // supremum is attained on the 1/64 grid up to the open-face offset.
  const double h = 1.0 / 64.0;
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const DecisionTree tree = RandomTree(trial, 2, 4);
    const Eigen::Vector2d s0(std::round(UniformIn(rng, -1.5, 1.5) * 64) / 64,
                             std::round(UniformIn(rng, -1.5, 1.5) * 64) / 64);
    const RobustnessResult r = EpsilonRobustness(tree, s0);
    const double grid = GridEpsilon(tree, s0, h, 256);
    if (std::isinf(r.epsilon)) {
      EXPECT_TRUE(std::isinf(grid));
      continue;
    }
    // Grid points on a closed upper face belong to the left leaf, so the
    // first differing grid point is at most one step beyond epsilon.
    EXPECT_LE(r.epsilon, grid + 1e-12) << "trial " << trial;
    EXPECT_GE(r.epsilon + h, grid - 1e-12) << "trial " << trial;
  }
}

TEST(RobustnessTest, BallInteriorKeepsTheAction) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const DecisionTree tree = RandomTree(100 + trial, 3, 5);
    Eigen::Vector3d s0;
    for (int k = 0; k < 3; ++k) s0[k] = UniformIn(rng, -1, 1);
    const RobustnessResult r = EpsilonRobustness(tree, s0);
    if (std::isinf(r.epsilon)) continue;
    const int a0 = tree.Predict(s0).index();
    for (int i = 0; i < 2000; ++i) {
      Eigen::Vector3d d;
      for (int k = 0; k < 3; ++k) d[k] = UniformIn(rng, -1, 1);
      EXPECT_EQ(tree.Predict(s0 + 0.999 * r.epsilon * d).index(), a0);
    }
    // The witness leaf is at distance epsilon and disagrees.
    ASSERT_TRUE(r.witness_point.has_value());
    const auto regions = tree.LeafRegions();
    const LeafBox* box = nullptr;
    for (const auto& reg : regions) {
      if (reg.node == *r.witness_leaf) box = &reg.box;
    }
    ASSERT_NE(box, nullptr);
    const StateVector w = PushIntoBox(*r.witness_point, *box, 1e-9);
    EXPECT_EQ(tree.LeafIndex(w), *r.witness_leaf);
    EXPECT_NE(tree.Predict(w).index(), a0);
    EXPECT_NEAR((*r.witness_point - s0).lpNorm<Eigen::Infinity>(), r.epsilon, 1e-12);
  }
}

TEST(RobustnessTest, CsvIsReproducibleWithoutTiming) {
  const DecisionTree tree = RandomTree(7, 2, 3);
  std::vector<StateVector> states = {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.3, -0.7)};
  const auto rows = RobustnessBatch(tree, states);
  const std::string a = RobustnessCsv(rows, 2, false);
  EXPECT_EQ(a, RobustnessCsv(RobustnessBatch(tree, states), 2, false));
  std::istringstream in(a);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "s0,s1,epsilon,witness_leaf,microseconds");
  const std::string path = (std::filesystem::temp_directory_path() / "vpk_robust.csv").string();
  RobustnessReport(tree, states, path);
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove(path);
}

TEST(RobustnessTest, RejectsLinearLeaves) {
  EXPECT_THROW(EpsilonRobustness(DecisionTree::LinearLeaf(Eigen::Vector2d(1, 1), 0), Eigen::Vector2d::Zero()),
               std::invalid_argument);
}

}  // namespace
}  // namespace vpk
