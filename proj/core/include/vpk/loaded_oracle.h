#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "vpk/oracle.h"

namespace vpk {

/// Raised for oracle files that do not follow the schema; the message names
/// the offending field.
class OracleSchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Oracle file formats (plain JSON, "kind" selects the model):
///
///   {"kind": "table", "dim": d, "num_actions": n,
///    "entries": [{"state": [...], "action": a,
///                 "q": [...] | "probs": [...]}, ...]}
///     Nearest entry (Euclidean) wins; ties go to the earlier entry.
///     Q-values come from "q", else log "probs", else 1 for the stored
///     action and 0 for the others. A stored action overrides the argmax.
///
///   {"kind": "linear_softmax", "dim": d, "num_actions": n,
///    "weights": [[...d...] x n], "bias": [...n...] (optional)}
///     Logits W s + b; Q is the log-softmax.
///
///   {"kind": "mlp", "dim": d, "num_actions": n, "output": "q" | "logits",
///    "layers": [{"weights": [[...]], "bias": [...],
///                "activation": "relu" | "tanh" | "linear"}, ...]}
///     Feed-forward net; "logits" outputs are turned into log-probabilities.
///
/// Otherwise Act is the argmax of Q (lowest index on ties).
class LoadedOracle final : public Oracle {
 public:
  static LoadedOracle FromJson(const nlohmann::json& j);
  /// Throws std::runtime_error naming the path when it cannot be read.
  static LoadedOracle FromFile(const std::string& path);

  ActionSpace action_space() const override { return ActionSpace::Discrete(num_actions_); }
  Action Act(const StateVector& s) const override;
  double QValue(const StateVector& s, const Action& a) const override;
  std::vector<double> QValues(const StateVector& s) const override;

  int dim() const { return dim_; }

 private:
  struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    std::string activation;
  };
  struct Entry {
    StateVector state;
    int action = -1;
    std::vector<double> q;
  };

  const Entry& Nearest(const StateVector& s) const;

  LoadedOracle() = default;

  std::string kind_;
  int dim_ = 0;
  int num_actions_ = 0;
  std::vector<Entry> table_;
  std::vector<Layer> layers_;
  bool log_softmax_ = false;
};

/// Records `oracle` on `states` as a table-oracle document with the oracle's
/// actions and Q-values.
nlohmann::json TableOracleJson(const Oracle& oracle,
                               const std::vector<StateVector>& states);

}  // namespace vpk
