#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "vpk/action.h"
#include "vpk/types.h"

namespace vpk {

enum class LeafKind { kDiscrete, kLinear };

/// Internal nodes route s to `left` when s[feature] <= threshold. Leaves
/// (feature < 0) hold an action index or a linear law coef . s + intercept.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int action = 0;
  Eigen::VectorXd coef;
  double intercept = 0.0;

  bool is_leaf() const { return feature < 0; }
};

/// Axis-aligned cell lower < s <= upper, componentwise. Infinite bounds mark
/// unconstrained sides. Upper faces are closed because the left branch takes
/// the boundary.
struct LeafBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  bool IsEmpty() const;
  static LeafBox Unbounded(int dim);
};

struct LeafRegion {
  int node = -1;
  LeafBox box;
  int action = 0;
  Eigen::VectorXd coef;
  double intercept = 0.0;
};

/// An axis-aligned decision tree over R^dim. Node 0 is the root.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(int dim, LeafKind kind, std::vector<TreeNode> nodes);

  static DecisionTree ConstantLeaf(int dim, int action);
  static DecisionTree LinearLeaf(const Eigen::VectorXd& coef, double intercept);

  int dim() const { return dim_; }
  LeafKind leaf_kind() const { return kind_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int depth() const;

  /// Index of the leaf that s is routed to. Throws std::invalid_argument on a
  /// dimension mismatch.
  int LeafIndex(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  Action Predict(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  /// Discrete leaves return the action index.
  double PredictValue(const Eigen::Ref<const Eigen::VectorXd>& s) const;

  /// Boxes of all reachable leaves in depth-first (left before right) order.
  std::vector<LeafRegion> LeafRegions() const;

  /// New tree whose root tests s[feature] <= threshold. States on the guarded
  /// side (the left side when `guard_left`, otherwise the right) receive
  /// `action`; the rest follow this tree. Adds two nodes.
  DecisionTree WithRootGuard(int feature, double threshold, int action,
                             bool guard_left = true) const;

  /// Throws std::invalid_argument unless the nodes form a single binary tree
  /// rooted at 0 with consistent leaf payloads.
  void Validate() const;

  bool operator==(const DecisionTree& other) const;

 private:
  int dim_ = 0;
  LeafKind kind_ = LeafKind::kDiscrete;
  std::vector<TreeNode> nodes_;
};

/// Canonical JSON: {"version": 1, "dim": d, "leaf_kind": "discrete"|"linear",
/// "nodes": [{"feature", "threshold", "left", "right"} | {"action"} |
/// {"coef", "intercept"}, ...]}, node 0 being the root.
nlohmann::json TreeToJson(const DecisionTree& tree);
/// Throws std::invalid_argument on a version mismatch or malformed input.
DecisionTree TreeFromJson(const nlohmann::json& j);
void SaveTree(const DecisionTree& tree, const std::string& path);
DecisionTree LoadTree(const std::string& path);

struct TreeConfig {
  int max_depth = 10;
  int min_samples_leaf = 1;
  LeafKind leaf_kind = LeafKind::kDiscrete;
  /// Candidate thresholds with |t| < origin_margin are not considered, which
  /// keeps split boundaries away from the equilibrium.
  double origin_margin = 0.0;
  /// Linear leaves only.
  bool fit_intercept = true;
  double ridge = 1e-8;

  nlohmann::json ToJson() const;
  static TreeConfig FromJson(const nlohmann::json& j);
};

/// Weighted Gini impurity 1 - sum p_k^2 of class counts.
double GiniImpurity(const std::vector<double>& counts);

/// Greedy CART classification on Gini impurity. Thresholds are midpoints of
/// consecutive distinct values; ties among equally good splits go to the
/// lowest feature, then the lowest threshold. Throws std::invalid_argument on
/// an empty dataset or inconsistent dimensions.
DecisionTree FitClassifier(const std::vector<StateVector>& states,
                           const std::vector<int>& labels,
                           const TreeConfig& config);

/// CART with least-squares linear leaves; splits minimize the summed squared
/// residuals of the two per-side fits.
DecisionTree FitLinearTree(const std::vector<StateVector>& states,
                           const std::vector<double>& targets,
                           const TreeConfig& config);

}  // namespace vpk
