#include <fstream>
#include <stdexcept>

#include "vpk/decision_tree.h"

namespace vpk {

namespace {

const nlohmann::json& Require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument("tree JSON: " + where + " is missing '" + key + "'");
  }
  return j.at(key);
}

}  // namespace

nlohmann::json TreeToJson(const DecisionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& node : tree.nodes()) {
    if (!node.is_leaf()) {
      nodes.push_back({{"feature", node.feature},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right}});
    } else if (tree.leaf_kind() == LeafKind::kDiscrete) {
      nodes.push_back({{"action", node.action}});
    } else {
      nodes.push_back({{"coef", std::vector<double>(node.coef.data(),
                                                    node.coef.data() + node.coef.size())},
                       {"intercept", node.intercept}});
    }
  }
  return {{"version", 1},
          {"dim", tree.dim()},
          {"leaf_kind", tree.leaf_kind() == LeafKind::kDiscrete ? "discrete" : "linear"},
          {"nodes", nodes}};
}

DecisionTree TreeFromJson(const nlohmann::json& j) {
  const nlohmann::json& version = Require(j, "version", "document");
  if (version != 1) {
    throw std::invalid_argument("tree JSON: unsupported version " + version.dump());
  }
  const int dim = Require(j, "dim", "document").get<int>();
  const std::string kind_name = Require(j, "leaf_kind", "document").get<std::string>();
  LeafKind kind;
  if (kind_name == "discrete") {
    kind = LeafKind::kDiscrete;
  } else if (kind_name == "linear") {
    kind = LeafKind::kLinear;
  } else {
    throw std::invalid_argument("tree JSON: unknown leaf_kind '" + kind_name + "'");
  }
  const nlohmann::json& list = Require(j, "nodes", "document");
  if (!list.is_array()) throw std::invalid_argument("tree JSON: 'nodes' must be an array");
  std::vector<TreeNode> nodes;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const nlohmann::json& n = list[i];
    const std::string where = "node " + std::to_string(i);
    TreeNode node;
    try {
      if (n.contains("feature")) {
        node.feature = n.at("feature").get<int>();
        if (node.feature < 0) throw std::invalid_argument("tree JSON: " + where + " has a negative feature");
        node.threshold = Require(n, "threshold", where).get<double>();
        node.left = Require(n, "left", where).get<int>();
        node.right = Require(n, "right", where).get<int>();
      } else if (kind == LeafKind::kDiscrete) {
        node.action = Require(n, "action", where).get<int>();
      } else {
        const auto coef = Require(n, "coef", where).get<std::vector<double>>();
        node.coef = Eigen::Map<const Eigen::VectorXd>(coef.data(), coef.size());
        node.intercept = n.value("intercept", 0.0);
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("tree JSON: " + where + ": " + e.what());
    }
    nodes.push_back(std::move(node));
  }
  return DecisionTree(dim, kind, std::move(nodes));
}

void SaveTree(const DecisionTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tree file: " + path);
  out << TreeToJson(tree).dump(2) << '\n';
}

DecisionTree LoadTree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("tree file " + path + " is not valid JSON: " + e.what());
  }
  return TreeFromJson(j);
}

}  // namespace vpk
