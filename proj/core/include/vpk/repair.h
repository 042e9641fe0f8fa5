#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "vpk/decision_tree.h"
#include "vpk/reachability.h"
#include "vpk/toypong.h"

namespace vpk {

/// New root s[feature] <= threshold (or > threshold when !guard_left) whose
/// guarded side takes `action`.
struct RootGuardPatch {
  int feature = 0;
  double threshold = 0.0;
  int action = 0;
  bool guard_left = true;
};

/// Sets one toy-Pong parameter by its JSON name, e.g. {"L", 4.5}.
struct ParamPatch {
  std::string name;
  double value = 0.0;
};

using Patch = std::variant<RootGuardPatch, ParamPatch>;

/// Parses {"root_guard": {"feature", "threshold", "action", "guard_left"}} or
/// {"param": {"name", "value"}}. Throws std::invalid_argument otherwise.
Patch PatchFromJson(const nlohmann::json& j);
nlohmann::json PatchToJson(const Patch& patch);

/// Toy-Pong start sets the repair workflow verifies against.
enum class ToyPongRegion { kFull, kCentered };
SafetySpec ToyPongSpec(const ToyPongParams& params, ToyPongRegion region);

struct RepairReport {
  Patch patch;
  Verdict before;
  Verdict after;
  DecisionTree tree;
  ToyPongParams params;
  bool verdict_changed = false;
  /// A counterexample left after patching replays on the patched system.
  bool remaining_replays = false;
  nlohmann::json ToJson() const;
};

/// Applies `patch` to (params, tree), and reports the reach-check verdicts
/// before and after. Throws std::invalid_argument for a guard feature outside
/// the state or an unknown parameter name.
RepairReport RepairToyPong(const ToyPongParams& params, const DecisionTree& tree,
                           ToyPongRegion region, const Patch& patch,
                           const ReachOptions& options = {});

/// Root guard aimed at a counterexample: splits on the ball's x at the start
/// of the trace and moves the paddle toward the side where the ball was missed.
RootGuardPatch RootGuardFromCounterexample(const Verdict& verdict);

}  // namespace vpk
