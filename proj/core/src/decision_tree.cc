#include "vpk/decision_tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vpk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

bool LeafBox::Contains(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  for (int i = 0; i < dim(); ++i) {
    if (!(s[i] > lower[i] && s[i] <= upper[i])) return false;
  }
  return true;
}

bool LeafBox::IsEmpty() const {
  for (int i = 0; i < dim(); ++i) {
    if (!(lower[i] < upper[i])) return true;
  }
  return false;
}

LeafBox LeafBox::Unbounded(int dim) {
  return {Eigen::VectorXd::Constant(dim, -kInf), Eigen::VectorXd::Constant(dim, kInf)};
}

DecisionTree::DecisionTree(int dim, LeafKind kind, std::vector<TreeNode> nodes)
    : dim_(dim), kind_(kind), nodes_(std::move(nodes)) {
  Validate();
}

DecisionTree DecisionTree::ConstantLeaf(int dim, int action) {
  TreeNode leaf;
  leaf.action = action;
  return DecisionTree(dim, LeafKind::kDiscrete, {leaf});
}

DecisionTree DecisionTree::LinearLeaf(const Eigen::VectorXd& coef, double intercept) {
  TreeNode leaf;
  leaf.coef = coef;
  leaf.intercept = intercept;
  return DecisionTree(static_cast<int>(coef.size()), LeafKind::kLinear, {leaf});
}

void DecisionTree::Validate() const {
  if (dim_ < 1) throw std::invalid_argument("tree dimension must be positive");
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");
  const int n = node_count();
  std::vector<int> parents(n, 0);
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) {
      if (kind_ == LeafKind::kDiscrete && node.action < 0) {
        throw std::invalid_argument("leaf " + std::to_string(i) + " has a negative action");
      }
      if (kind_ == LeafKind::kLinear && node.coef.size() != dim_) {
        throw std::invalid_argument("leaf " + std::to_string(i) + " coef size != dim");
      }
      continue;
    }
    if (node.feature >= dim_) {
      throw std::invalid_argument("node " + std::to_string(i) + " feature out of range");
    }
    if (!std::isfinite(node.threshold)) {
      throw std::invalid_argument("node " + std::to_string(i) + " threshold is not finite");
    }
    for (int child : {node.left, node.right}) {
      if (child <= 0 || child >= n) {
        throw std::invalid_argument("node " + std::to_string(i) + " has an invalid child");
      }
      ++parents[child];
    }
  }
  if (parents[0] != 0) throw std::invalid_argument("root has a parent");
  for (int i = 1; i < n; ++i) {
    if (parents[i] != 1) {
      throw std::invalid_argument("node " + std::to_string(i) + " must have exactly one parent");
    }
  }
  // n - 1 edges with unique parents and a parentless root: connected iff every
  // node is reachable from the root.
  std::vector<int> stack = {0};
  int seen = 0;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    ++seen;
    if (!nodes_[i].is_leaf()) {
      stack.push_back(nodes_[i].left);
      stack.push_back(nodes_[i].right);
    }
    if (seen > n) break;
  }
  if (seen != n) throw std::invalid_argument("tree nodes are not all reachable from the root");
}

int DecisionTree::depth() const {
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[i].is_leaf()) {
      stack.push_back({nodes_[i].left, d + 1});
      stack.push_back({nodes_[i].right, d + 1});
    }
  }
  return best;
}

int DecisionTree::LeafIndex(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  if (s.size() != dim_) {
    throw std::invalid_argument("state has dimension " + std::to_string(s.size()) +
                                ", tree expects " + std::to_string(dim_));
  }
  int i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& node = nodes_[i];
    i = s[node.feature] <= node.threshold ? node.left : node.right;
  }
  return i;
}

Action DecisionTree::Predict(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  const TreeNode& leaf = nodes_[LeafIndex(s)];
  if (kind_ == LeafKind::kDiscrete) return Action::Discrete(leaf.action);
  return Action::Continuous(leaf.coef.dot(s) + leaf.intercept);
}

double DecisionTree::PredictValue(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  return Predict(s).value();
}

std::vector<LeafRegion> DecisionTree::LeafRegions() const {
  std::vector<LeafRegion> out;
  struct Frame {
    int node;
    LeafBox box;
  };
  std::vector<Frame> stack = {{0, LeafBox::Unbounded(dim_)}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.box.IsEmpty()) continue;
    const TreeNode& node = nodes_[f.node];
    if (node.is_leaf()) {
      out.push_back({f.node, f.box, node.action, node.coef, node.intercept});
      continue;
    }
    LeafBox left = f.box;
    LeafBox right = std::move(f.box);
    left.upper[node.feature] = std::min(left.upper[node.feature], node.threshold);
    right.lower[node.feature] = std::max(right.lower[node.feature], node.threshold);
    // Right is pushed first so that the left subtree is emitted first.
    stack.push_back({node.right, std::move(right)});
    stack.push_back({node.left, std::move(left)});
  }
  return out;
}

DecisionTree DecisionTree::WithRootGuard(int feature, double threshold, int action,
                                         bool guard_left) const {
  if (feature < 0 || feature >= dim_) {
    throw std::invalid_argument("guard feature " + std::to_string(feature) +
                                " is outside the state dimension " + std::to_string(dim_));
  }
  if (kind_ != LeafKind::kDiscrete) throw std::invalid_argument("root guards need discrete leaves");
  std::vector<TreeNode> nodes;
  nodes.reserve(nodes_.size() + 2);
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  TreeNode guard;
  guard.action = action;
  // Layout: root, guard leaf, then the old tree shifted by two.
  root.left = guard_left ? 1 : 2;
  root.right = guard_left ? 2 : 1;
  nodes.push_back(root);
  nodes.push_back(guard);
  for (TreeNode node : nodes_) {
    if (!node.is_leaf()) {
      node.left += 2;
      node.right += 2;
    }
    nodes.push_back(std::move(node));
  }
  return DecisionTree(dim_, kind_, std::move(nodes));
}

bool DecisionTree::operator==(const DecisionTree& other) const {
  if (dim_ != other.dim_ || kind_ != other.kind_ || nodes_.size() != other.nodes_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& a = nodes_[i];
    const TreeNode& b = other.nodes_[i];
    if (a.feature != b.feature) return false;
    if (!a.is_leaf()) {
      if (a.threshold != b.threshold || a.left != b.left || a.right != b.right) return false;
    } else if (kind_ == LeafKind::kDiscrete) {
      if (a.action != b.action) return false;
    } else if (a.coef != b.coef || a.intercept != b.intercept) {
      return false;
    }
  }
  return true;
}

}  // namespace vpk
