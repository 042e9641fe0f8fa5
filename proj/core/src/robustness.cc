#include "vpk/robustness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vpk {

double LeafLinfDistance(const Eigen::Ref<const Eigen::VectorXd>& s0, const LeafBox& box) {
  if (s0.size() != box.dim()) throw std::invalid_argument("state and box dimensions differ");
  double dist = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    dist = std::max({dist, box.lower[i] - s0[i], s0[i] - box.upper[i]});
  }
  return dist;
}

RobustnessResult EpsilonRobustness(const DecisionTree& tree,
                                   const Eigen::Ref<const Eigen::VectorXd>& s0) {
  if (tree.leaf_kind() != LeafKind::kDiscrete) {
    throw std::invalid_argument("robustness needs a discrete-leaf tree");
  }
  const int action = tree.nodes()[tree.LeafIndex(s0)].action;
  RobustnessResult result;
  result.epsilon = std::numeric_limits<double>::infinity();
  for (const LeafRegion& region : tree.LeafRegions()) {
    if (region.action == action) continue;
    const double d = LeafLinfDistance(s0, region.box);
    if (d < result.epsilon) {
      result.epsilon = d;
      result.witness_leaf = region.node;
      result.witness_point =
          s0.cwiseMax(region.box.lower).cwiseMin(region.box.upper).eval();
    }
  }
  return result;
}

StateVector PushIntoBox(const StateVector& point, const LeafBox& box, double push) {
  StateVector out = point;
  for (int i = 0; i < box.dim(); ++i) {
    if (out[i] <= box.lower[i]) out[i] = box.lower[i] + push;
  }
  return out;
}

std::vector<RobustnessRow> RobustnessBatch(const DecisionTree& tree,
                                           const std::vector<StateVector>& states) {
  std::vector<RobustnessRow> rows;
  rows.reserve(states.size());
  for (const StateVector& s : states) {
    const auto start = std::chrono::steady_clock::now();
    RobustnessResult r = EpsilonRobustness(tree, s);
    const auto stop = std::chrono::steady_clock::now();
    rows.push_back({s, std::move(r),
                    std::chrono::duration<double, std::micro>(stop - start).count()});
  }
  return rows;
}

std::string RobustnessCsv(const std::vector<RobustnessRow>& rows, int dim, bool include_timing) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < dim; ++i) out << 's' << i << ',';
  out << "epsilon,witness_leaf,microseconds\n";
  for (const RobustnessRow& row : rows) {
    for (int i = 0; i < dim; ++i) out << row.state[i] << ',';
    if (std::isinf(row.result.epsilon)) {
      out << "inf";
    } else {
      out << row.result.epsilon;
    }
    out << ',';
    if (row.result.witness_leaf) out << *row.result.witness_leaf;
    out << ',';
    if (include_timing) out << row.microseconds;
    out << '\n';
  }
  return out.str();
}

std::vector<RobustnessRow> RobustnessReport(const DecisionTree& tree,
                                            const std::vector<StateVector>& states,
                                            const std::string& path) {
  std::vector<RobustnessRow> rows = RobustnessBatch(tree, states);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write robustness report: " + path);
  out << RobustnessCsv(rows, tree.dim());
  return rows;
}

}  // namespace vpk
