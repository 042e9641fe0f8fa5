#include "vpk/loaded_oracle.h"

#include <cmath>
#include <fstream>
#include <limits>

namespace vpk {

namespace {

[[noreturn]] void Fail(const std::string& field, const std::string& problem) {
  throw OracleSchemaError("oracle file: field '" + field + "' " + problem);
}

const nlohmann::json& Field(const nlohmann::json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) Fail(name, "is missing");
  return j.at(name);
}

int PositiveInt(const nlohmann::json& j, const std::string& name) {
  const nlohmann::json& v = Field(j, name);
  if (!v.is_number_integer() || v.get<int>() < 1) Fail(name, "must be a positive integer");
  return v.get<int>();
}

Eigen::VectorXd Vector(const nlohmann::json& v, const std::string& name, int size) {
  if (!v.is_array() || static_cast<int>(v.size()) != size) {
    Fail(name, "must be an array of " + std::to_string(size) + " numbers");
  }
  Eigen::VectorXd out(size);
  for (int i = 0; i < size; ++i) {
    if (!v[i].is_number()) Fail(name, "must contain only numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd Matrix(const nlohmann::json& v, const std::string& name, int rows, int cols) {
  if (!v.is_array() || static_cast<int>(v.size()) != rows) {
    Fail(name, "must have " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r) out.row(r) = Vector(v[r], name, cols).transpose();
  return out;
}

std::vector<double> LogSoftmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  const double log_z = top + std::log((logits.array() - top).exp().sum());
  std::vector<double> out(logits.size());
  for (int i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

}  // namespace

LoadedOracle LoadedOracle::FromJson(const nlohmann::json& j) {
  LoadedOracle o;
  const nlohmann::json& kind = Field(j, "kind");
  if (!kind.is_string()) Fail("kind", "must be a string");
  o.kind_ = kind.get<std::string>();
  o.dim_ = PositiveInt(j, "dim");
  o.num_actions_ = PositiveInt(j, "num_actions");

  if (o.kind_ == "table") {
    const nlohmann::json& entries = Field(j, "entries");
    if (!entries.is_array() || entries.empty()) Fail("entries", "must be a non-empty array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const nlohmann::json& e = entries[i];
      const std::string prefix = "entries[" + std::to_string(i) + "].";
      Entry entry;
      if (!e.is_object() || !e.contains("state")) Fail(prefix + "state", "is missing");
      entry.state = Vector(e.at("state"), prefix + "state", o.dim_);
      if (e.contains("q")) {
        const Eigen::VectorXd q = Vector(e.at("q"), prefix + "q", o.num_actions_);
        entry.q.assign(q.data(), q.data() + q.size());
      } else if (e.contains("probs")) {
        const Eigen::VectorXd p = Vector(e.at("probs"), prefix + "probs", o.num_actions_);
        if (std::abs(p.sum() - 1.0) > 1e-9 || (p.array() < 0).any()) {
          Fail(prefix + "probs", "must be a probability vector");
        }
        for (int a = 0; a < o.num_actions_; ++a) {
          entry.q.push_back(p[a] > 0 ? std::log(p[a])
                                     : -std::numeric_limits<double>::infinity());
        }
      }
      if (e.contains("action")) {
        const nlohmann::json& a = e.at("action");
        if (!a.is_number_integer() || a.get<int>() < 0 || a.get<int>() >= o.num_actions_) {
          Fail(prefix + "action", "must be an action index");
        }
        entry.action = a.get<int>();
      }
      if (entry.q.empty()) {
        if (entry.action < 0) Fail(prefix + "action", "is missing");
        entry.q.assign(o.num_actions_, 0.0);
        entry.q[entry.action] = 1.0;
      }
      o.table_.push_back(std::move(entry));
    }
  } else if (o.kind_ == "linear_softmax") {
    Layer layer;
    layer.W = Matrix(Field(j, "weights"), "weights", o.num_actions_, o.dim_);
    layer.b = j.contains("bias") ? Vector(j.at("bias"), "bias", o.num_actions_)
                                 : Eigen::VectorXd::Zero(o.num_actions_);
    layer.activation = "linear";
    o.layers_.push_back(std::move(layer));
    o.log_softmax_ = true;
  } else if (o.kind_ == "mlp") {
    const nlohmann::json& output = Field(j, "output");
    if (output != "q" && output != "logits") Fail("output", "must be \"q\" or \"logits\"");
    o.log_softmax_ = output == "logits";
    const nlohmann::json& layers = Field(j, "layers");
    if (!layers.is_array() || layers.empty()) Fail("layers", "must be a non-empty array");
    int width = o.dim_;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string prefix = "layers[" + std::to_string(i) + "].";
      const nlohmann::json& l = layers[i];
      if (!l.is_object() || !l.contains("weights")) Fail(prefix + "weights", "is missing");
      const nlohmann::json& w = l.at("weights");
      if (!w.is_array() || w.empty()) Fail(prefix + "weights", "must be a non-empty matrix");
      Layer layer;
      const int rows = static_cast<int>(w.size());
      layer.W = Matrix(w, prefix + "weights", rows, width);
      layer.b = l.contains("bias") ? Vector(l.at("bias"), prefix + "bias", rows)
                                   : Eigen::VectorXd::Zero(rows);
      layer.activation = l.value("activation", std::string("linear"));
      if (layer.activation != "relu" && layer.activation != "tanh" &&
          layer.activation != "linear") {
        Fail(prefix + "activation", "must be relu, tanh or linear");
      }
      width = rows;
      o.layers_.push_back(std::move(layer));
    }
    if (width != o.num_actions_) Fail("layers", "must end with num_actions outputs");
  } else {
    Fail("kind", "must be table, linear_softmax or mlp");
  }
  return o;
}

LoadedOracle LoadedOracle::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw OracleSchemaError("oracle file " + path + " is not valid JSON: " + e.what());
  }
  return FromJson(j);
}

const LoadedOracle::Entry& LoadedOracle::Nearest(const StateVector& s) const {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table_.size(); ++i) {
    const double d = (table_[i].state - s).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return table_[best];
}

std::vector<double> LoadedOracle::QValues(const StateVector& s) const {
  if (s.size() != dim_) throw std::invalid_argument("state dimension does not match the oracle");
  if (kind_ == "table") return Nearest(s).q;
  Eigen::VectorXd x = s;
  for (const Layer& layer : layers_) {
    x = layer.W * x + layer.b;
    if (layer.activation == "relu") {
      x = x.cwiseMax(0.0);
    } else if (layer.activation == "tanh") {
      x = x.array().tanh().matrix();
    }
  }
  if (log_softmax_) return LogSoftmax(x);
  return std::vector<double>(x.data(), x.data() + x.size());
}

Action LoadedOracle::Act(const StateVector& s) const {
  if (kind_ == "table") {
    if (s.size() != dim_) throw std::invalid_argument("state dimension does not match the oracle");
    const Entry& e = Nearest(s);
    if (e.action >= 0) return Action::Discrete(e.action);
  }
  return Action::Discrete(ArgMax(QValues(s)));
}

double LoadedOracle::QValue(const StateVector& s, const Action& a) const {
  return QValues(s).at(a.index());
}

nlohmann::json TableOracleJson(const Oracle& oracle, const std::vector<StateVector>& states) {
  const ActionSpace space = oracle.action_space();
  if (!space.is_discrete()) throw std::invalid_argument("table oracles need discrete actions");
  if (states.empty()) throw std::invalid_argument("table oracle needs at least one state");
  nlohmann::json entries = nlohmann::json::array();
  for (const StateVector& s : states) {
    entries.push_back({{"state", std::vector<double>(s.data(), s.data() + s.size())},
                       {"action", oracle.Act(s).index()},
                       {"q", oracle.QValues(s)}});
  }
  return {{"kind", "table"},
          {"dim", states.front().size()},
          {"num_actions", space.num_discrete},
          {"entries", entries}};
}

}  // namespace vpk
