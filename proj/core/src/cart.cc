#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "vpk/decision_tree.h"

namespace vpk {

nlohmann::json TreeConfig::ToJson() const {
  return {{"max_depth", max_depth},
          {"min_samples_leaf", min_samples_leaf},
          {"leaf_kind", leaf_kind == LeafKind::kDiscrete ? "discrete" : "linear"},
          {"origin_margin", origin_margin},
          {"fit_intercept", fit_intercept},
          {"ridge", ridge}};
}

TreeConfig TreeConfig::FromJson(const nlohmann::json& j) {
  TreeConfig c;
  c.max_depth = j.value("max_depth", c.max_depth);
  c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
  const std::string kind = j.value("leaf_kind", std::string("discrete"));
  if (kind == "discrete") {
    c.leaf_kind = LeafKind::kDiscrete;
  } else if (kind == "linear") {
    c.leaf_kind = LeafKind::kLinear;
  } else {
    throw std::invalid_argument("tree config: unknown leaf_kind '" + kind + "'");
  }
  c.origin_margin = j.value("origin_margin", c.origin_margin);
  c.fit_intercept = j.value("fit_intercept", c.fit_intercept);
  c.ridge = j.value("ridge", c.ridge);
  if (c.max_depth < 0 || c.min_samples_leaf < 1 || c.origin_margin < 0 || c.ridge < 0) {
    throw std::invalid_argument("tree config: max_depth >= 0, min_samples_leaf >= 1, "
                                "origin_margin >= 0 and ridge >= 0 required");
  }
  return c;
}

double GiniImpurity(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

namespace {

constexpr double kMinGain = 1e-12;

using SortedIndex = std::vector<std::vector<int>>;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();
};

void CheckData(const std::vector<StateVector>& states, std::size_t num_targets,
               const TreeConfig& config) {
  if (states.empty()) throw std::invalid_argument("cannot fit a tree to an empty dataset");
  if (states.size() != num_targets) {
    throw std::invalid_argument("states and labels differ in length");
  }
  const auto d = states.front().size();
  if (d < 1) throw std::invalid_argument("states must have positive dimension");
  for (const StateVector& s : states) {
    if (s.size() != d) throw std::invalid_argument("states have inconsistent dimensions");
    if (!s.allFinite()) throw std::invalid_argument("states must be finite");
  }
  if (config.max_depth < 0 || config.min_samples_leaf < 1) {
    throw std::invalid_argument("invalid tree config");
  }
}

SortedIndex Presort(const std::vector<StateVector>& states) {
  const int n = static_cast<int>(states.size());
  const int d = static_cast<int>(states.front().size());
  SortedIndex sorted(d, std::vector<int>(n));
  for (int f = 0; f < d; ++f) {
    std::iota(sorted[f].begin(), sorted[f].end(), 0);
    std::stable_sort(sorted[f].begin(), sorted[f].end(),
                     [&](int a, int b) { return states[a][f] < states[b][f]; });
  }
  return sorted;
}

// Midpoint threshold strictly below `hi` so that `hi` goes right.
double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

// Partitions every presorted list by the split, preserving order.
std::pair<SortedIndex, SortedIndex> Partition(const std::vector<StateVector>& states,
                                              const SortedIndex& sorted, const Split& split) {
  SortedIndex left(sorted.size());
  SortedIndex right(sorted.size());
  for (std::size_t f = 0; f < sorted.size(); ++f) {
    for (int i : sorted[f]) {
      (states[i][split.feature] <= split.threshold ? left : right)[f].push_back(i);
    }
  }
  return {std::move(left), std::move(right)};
}

class ClassifierBuilder {
 public:
  ClassifierBuilder(const std::vector<StateVector>& states, const std::vector<int>& labels,
                    const TreeConfig& config)
      : states_(states), labels_(labels), config_(config) {
    for (int y : labels) {
      if (y < 0) throw std::invalid_argument("class labels must be nonnegative");
      num_classes_ = std::max(num_classes_, y + 1);
    }
  }

  int Build(const SortedIndex& sorted, int depth) {
    const std::vector<int>& rows = sorted.front();
    const int n = static_cast<int>(rows.size());
    std::vector<double> counts(num_classes_, 0.0);
    for (int i : rows) counts[labels_[i]] += 1.0;

    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].action = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());

    const double parent = GiniImpurity(counts);
    if (depth >= config_.max_depth || parent == 0.0 || n < 2 * config_.min_samples_leaf) {
      return id;
    }
    const Split split = BestSplit(sorted, counts);
    if (split.feature < 0 || parent - split.score <= kMinGain) return id;

    auto [left, right] = Partition(states_, sorted, split);
    const int l = Build(left, depth + 1);
    const int r = Build(right, depth + 1);
    TreeNode& node = nodes_[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<TreeNode> TakeNodes() { return std::move(nodes_); }

 private:
  Split BestSplit(const SortedIndex& sorted, const std::vector<double>& total) const {
    Split best;
    const int n = static_cast<int>(sorted.front().size());
    const int min_leaf = config_.min_samples_leaf;
    for (int f = 0; f < static_cast<int>(sorted.size()); ++f) {
      const std::vector<int>& order = sorted[f];
      std::vector<double> left(num_classes_, 0.0);
      double left_sq = 0.0;
      double right_sq = 0.0;
      for (double c : total) right_sq += c * c;
      for (int k = 0; k + 1 < n; ++k) {
        const int y = labels_[order[k]];
        const double right_y = total[y] - left[y];
        left_sq += 2.0 * left[y] + 1.0;
        right_sq -= 2.0 * right_y - 1.0;
        left[y] += 1.0;
        const double lo = states_[order[k]][f];
        const double hi = states_[order[k + 1]][f];
        if (!(lo < hi)) continue;
        const int nl = k + 1;
        const int nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double t = Midpoint(lo, hi);
        if (std::abs(t) < config_.origin_margin) continue;
        // Weighted Gini: (nl (1 - sum pl^2) + nr (1 - sum pr^2)) / n.
        const double score = (nl - left_sq / nl + nr - right_sq / nr) / n;
        if (score < best.score - kMinGain) best = {f, t, score};
      }
    }
    return best;
  }

  const std::vector<StateVector>& states_;
  const std::vector<int>& labels_;
  const TreeConfig& config_;
  int num_classes_ = 0;
  std::vector<TreeNode> nodes_;
};

class LinearBuilder {
 public:
  LinearBuilder(const std::vector<StateVector>& states, const std::vector<double>& targets,
                const TreeConfig& config)
      : states_(states), targets_(targets), config_(config) {
    dim_ = static_cast<int>(states.front().size());
    p_ = dim_ + (config.fit_intercept ? 1 : 0);
    for (double y : targets) {
      if (!std::isfinite(y)) throw std::invalid_argument("regression targets must be finite");
    }
  }

  int Build(const SortedIndex& sorted, int depth) {
    const std::vector<int>& rows = sorted.front();
    const int n = static_cast<int>(rows.size());
    Stats total(p_);
    for (int i : rows) total.Add(Features(i), targets_[i]);

    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const Eigen::VectorXd beta = Solve(total);
    nodes_[id].coef = beta.head(dim_);
    nodes_[id].intercept = config_.fit_intercept ? beta[dim_] : 0.0;

    const double parent = Sse(total);
    if (depth >= config_.max_depth || n < 2 * config_.min_samples_leaf ||
        parent <= kMinGain) {
      return id;
    }
    const Split split = BestSplit(sorted, total);
    if (split.feature < 0 || parent - split.score <= kMinGain * std::max(1.0, parent)) {
      return id;
    }
    auto [left, right] = Partition(states_, sorted, split);
    const int l = Build(left, depth + 1);
    const int r = Build(right, depth + 1);
    TreeNode& node = nodes_[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    node.coef.resize(0);
    node.intercept = 0.0;
    return id;
  }

  std::vector<TreeNode> TakeNodes() { return std::move(nodes_); }

 private:
  struct Stats {
    explicit Stats(int p)
        : G(Eigen::MatrixXd::Zero(p, p)), b(Eigen::VectorXd::Zero(p)) {}
    void Add(const Eigen::VectorXd& z, double y) {
      G.selfadjointView<Eigen::Lower>().rankUpdate(z);
      b += y * z;
      yy += y * y;
    }
    Eigen::MatrixXd G;  // lower triangle only
    Eigen::VectorXd b;
    double yy = 0.0;
  };

  Eigen::VectorXd Features(int i) const {
    Eigen::VectorXd z(p_);
    z.head(dim_) = states_[i];
    if (config_.fit_intercept) z[dim_] = 1.0;
    return z;
  }

  Eigen::VectorXd Solve(const Stats& s) const {
    Eigen::MatrixXd G = s.G.selfadjointView<Eigen::Lower>();
    G.diagonal().array() += config_.ridge;
    return G.ldlt().solve(s.b);
  }

  double Sse(const Stats& s) const {
    return std::max(0.0, s.yy - Solve(s).dot(s.b));
  }

  Split BestSplit(const SortedIndex& sorted, const Stats& total) const {
    Split best;
    const int n = static_cast<int>(sorted.front().size());
    const int min_leaf = config_.min_samples_leaf;
    for (int f = 0; f < static_cast<int>(sorted.size()); ++f) {
      const std::vector<int>& order = sorted[f];
      Stats left(p_);
      for (int k = 0; k + 1 < n; ++k) {
        left.Add(Features(order[k]), targets_[order[k]]);
        const double lo = states_[order[k]][f];
        const double hi = states_[order[k + 1]][f];
        if (!(lo < hi)) continue;
        const int nl = k + 1;
        if (nl < min_leaf || n - nl < min_leaf) continue;
        const double t = Midpoint(lo, hi);
        if (std::abs(t) < config_.origin_margin) continue;
        Stats right(p_);
        right.G = total.G - left.G;
        right.b = total.b - left.b;
        right.yy = total.yy - left.yy;
        const double score = Sse(left) + Sse(right);
        if (best.feature < 0 || score < best.score - kMinGain * std::max(1.0, best.score)) {
          best = {f, t, score};
        }
      }
    }
    return best;
  }

  const std::vector<StateVector>& states_;
  const std::vector<double>& targets_;
  const TreeConfig& config_;
  int dim_ = 0;
  int p_ = 0;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree FitClassifier(const std::vector<StateVector>& states,
                           const std::vector<int>& labels, const TreeConfig& config) {
  CheckData(states, labels.size(), config);
  ClassifierBuilder builder(states, labels, config);
  builder.Build(Presort(states), 0);
  return DecisionTree(static_cast<int>(states.front().size()), LeafKind::kDiscrete,
                      builder.TakeNodes());
}

DecisionTree FitLinearTree(const std::vector<StateVector>& states,
                           const std::vector<double>& targets, const TreeConfig& config) {
  CheckData(states, targets.size(), config);
  LinearBuilder builder(states, targets, config);
  builder.Build(Presort(states), 0);
  return DecisionTree(static_cast<int>(states.front().size()), LeafKind::kLinear,
                      builder.TakeNodes());
}

}  // namespace vpk
