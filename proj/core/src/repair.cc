#include "vpk/repair.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vpk/correctness_problems.h"

namespace vpk {

Patch PatchFromJson(const nlohmann::json& j) {
  if (j.contains("root_guard")) {
    const nlohmann::json& g = j.at("root_guard");
    RootGuardPatch p;
    p.feature = g.at("feature").get<int>();
    p.threshold = g.at("threshold").get<double>();
    p.action = g.at("action").get<int>();
    p.guard_left = g.value("guard_left", true);
    return p;
  }
  if (j.contains("param")) {
    const nlohmann::json& g = j.at("param");
    return ParamPatch{g.at("name").get<std::string>(), g.at("value").get<double>()};
  }
  throw std::invalid_argument("patch needs a 'root_guard' or 'param' entry");
}

nlohmann::json PatchToJson(const Patch& patch) {
  if (const auto* g = std::get_if<RootGuardPatch>(&patch)) {
    return {{"root_guard",
             {{"feature", g->feature},
              {"threshold", g->threshold},
              {"action", g->action},
              {"guard_left", g->guard_left}}}};
  }
  const auto& p = std::get<ParamPatch>(patch);
  return {{"param", {{"name", p.name}, {"value", p.value}}}};
}

SafetySpec ToyPongSpec(const ToyPongParams& params, ToyPongRegion region) {
  return region == ToyPongRegion::kFull ? ToyPongSafetySpec(params) : ToyPongCenteredSpec(params);
}

nlohmann::json RepairReport::ToJson() const {
  return {{"patch", PatchToJson(patch)},
          {"before", before.ToJson()},
          {"after", after.ToJson()},
          {"params", params.ToJson()},
          {"tree_nodes", tree.node_count()},
          {"verdict_changed", verdict_changed},
          {"remaining_replays", remaining_replays}};
}

RepairReport RepairToyPong(const ToyPongParams& params, const DecisionTree& tree,
                           ToyPongRegion region, const Patch& patch,
                           const ReachOptions& options) {
  RepairReport report{patch, {}, {}, tree, params};
  if (const auto* g = std::get_if<RootGuardPatch>(&patch)) {
    if (g->action < 0 || g->action > kPaddleStay) {
      throw std::invalid_argument("guard action " + std::to_string(g->action) + " is not a toy-Pong action");
    }
    report.tree = tree.WithRootGuard(g->feature, g->threshold, g->action, g->guard_left);
  } else {
    const auto& p = std::get<ParamPatch>(patch);
    nlohmann::json j = params.ToJson();
    if (!j.contains(p.name)) throw std::invalid_argument("unknown toy-Pong parameter '" + p.name + "'");
    j[p.name] = p.value;
    report.params = ToyPongParams::FromJson(j);
  }
  report.before = ReachCheck(ToyPongClosedLoop(params, tree), ToyPongSpec(params, region), options);
  const SafetySpec after_spec = ToyPongSpec(report.params, region);
  report.after = ReachCheck(ToyPongClosedLoop(report.params, report.tree), after_spec, options);
  const auto signature = [](const Verdict& v) {
    return std::make_tuple(v.outcome, v.violation_step, v.piece_path, v.initial_exact);
  };
  report.verdict_changed = signature(report.before) != signature(report.after);
  if (report.after.outcome == Outcome::kCounterexample) {
    report.remaining_replays = ReplayCounterexample(
        report.after.trace.front(), ToyPongTreeStep(report.params, report.tree), after_spec);
  }
  return report;
}

RootGuardPatch RootGuardFromCounterexample(const Verdict& verdict) {
  if (verdict.outcome != Outcome::kCounterexample || verdict.trace.empty()) {
    throw std::invalid_argument("root guard needs a counterexample trace");
  }
  const StateVector& first = verdict.trace.front();
  const StateVector& last = verdict.trace.back();
  RootGuardPatch p;
  p.feature = kBallX;
  if (last[kBallX] < last[kPaddleX]) {
    p.threshold = first[kBallX];
    p.action = kPaddleLeft;
    p.guard_left = true;
  } else {
    // The guarded side is open, so step just below the start to include it.
    p.threshold = std::nextafter(first[kBallX], -std::numeric_limits<double>::infinity());
    p.action = kPaddleRight;
    p.guard_left = false;
  }
  return p;
}

}  // namespace vpk
