// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "test_support.h"
#include "vpk/cartpole.h"
#include "vpk/correctness_problems.h"
#include "vpk/decision_tree.h"
#include "vpk/duelpong.h"
#include "vpk/dynamic_programming.h"
#include "vpk/figure2.h"
#include "vpk/oracle.h"
#include "vpk/reachability.h"
#include "vpk/repair.h"
#include "vpk/robustness.h"
#include "vpk/rollout.h"
#include "vpk/smtlib.h"
#include "vpk/stability.h"
#include "vpk/sweep.h"
#include "vpk/toypong.h"
#include "vpk/viper.h"

namespace vpk {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

// Shared between criteria: the cart-pole tree of 3 is verified in 6.
std::shared_ptr<DecisionTree> g_cartpole_tree;

// ---------------------------------------------------------------------------
// 1. T * ell(pi) = J(pi) - J(pi*) on random tabular MDPs.
CriterionResult LossIdentity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 3 + i % 8, m = 2 + i % 3, T = 2 + i % 11;
    const TabularMdp mdp = testing::RandomMdp(50'000 + i, n, m, T);
    const TabularPolicy oracle = testing::RandomPolicy(60'000 + i, n, m);
    const TabularPolicy pi = testing::RandomPolicy(70'000 + i, n, m);
    const int s0 = mdp.initial_state();
    const double gap =
        DpEvaluate(mdp, pi).cost_to_go(s0) - DpEvaluate(mdp, oracle).cost_to_go(s0);
    worst = std::max(worst, std::abs(T * QDaggerLoss(mdp, pi, oracle) - gap));
  }
  const double secs = Seconds(t0);
  std::ostringstream d;
  d << "max |T*ell - (J(pi)-J(pi*))| = " << worst << " over 50 MDPs, " << secs << " s";
  return {worst <= 1e-9 && secs < 10.0, d.str()};
}

// 2. Values of the k = 5, alpha = 0.5 chain.
CriterionResult ChainValues() {
  const auto t0 = Clock::now();
  const int k = 5;
  const TabularMdp mdp = figure2::Make(k, 0.5);
  const TabularPolicy opt = figure2::OptimalPolicy(k);
  const TabularPolicy left = figure2::ConstantPolicy(k, figure2::kLeft);
  const TabularPolicy right = figure2::ConstantPolicy(k, figure2::kRight);
  const int s0 = mdp.initial_state();
  const double j_opt = DpEvaluate(mdp, opt).cost_to_go(s0);
  const double j_left = DpEvaluate(mdp, left).cost_to_go(s0);
  const double j_right = DpEvaluate(mdp, right).cost_to_go(s0);
  const double g_left = ZeroOneLoss(mdp, left, opt);
  const double g_right = ZeroOneLoss(mdp, right, opt);
  const double l_left = QDaggerLoss(mdp, left, opt);
  const double l_right = QDaggerLoss(mdp, right, opt);
  const double tol = 1e-12;
  const bool ok = mdp.horizon() == 18 && std::abs(j_opt + 18.0) <= tol &&
                  std::abs(j_left) <= tol && std::abs(j_right + 17.5) <= tol &&
                  std::abs(g_left - 1.0 / 18.0) <= tol && std::abs(l_left - 1.0) <= tol &&
                  std::abs(l_right - 0.5 / 18.0) <= tol && g_right >= 0.25;
  const double secs = Seconds(t0);
  std::ostringstream d;
  d << std::setprecision(15) << "J*=" << j_opt << " J(left)=" << j_left << " J(right)=" << j_right
    << " g(left)=" << g_left << " ell(left)=" << l_left << " ell(right)=" << l_right
    << " g(right)=" << g_right << " (DP value 5/18), " << std::setprecision(4) << secs << " s";
  return {ok && secs < 1.0, d.str()};
}

// 3. Cart-pole extraction with the LQR oracle.
CriterionResult CartPoleExtraction() {
  const auto t0 = Clock::now();
  CartPoleEnv env;
  const auto oracle = MakeOracle("lqr", env);
  ExtractionConfig cfg;
  cfg.iterations = 10;
  cfg.rollouts = 10;
  cfg.seed = 7;
  cfg.tree.max_depth = 2;
  const ExtractionResult r = Viper(env, *oracle, cfg);
  g_cartpole_tree = std::make_shared<DecisionTree>(r.best);
  const double reward = MeanReward(env, TreePolicy(g_cartpole_tree), 100, 424242);
  const double secs = Seconds(t0);
  std::ostringstream d;
  d << r.best.node_count() << " nodes, mean reward " << reward << " over 100 rollouts, " << secs
    << " s";
  return {r.best.node_count() <= 7 && reward >= 195.0 && secs < 300.0, d.str()};
}

// 4. Toy Pong extraction with the scripted expert.
CriterionResult ToyPongExtraction() {
  const auto t0 = Clock::now();
  ToyPongEnv env;
  const auto oracle = MakeOracle("expert", env);
  ExtractionConfig cfg;
  cfg.iterations = 40;
  cfg.rollouts = 200;
  cfg.resample_size = 50'000;
  cfg.seed = 8;
  cfg.tree.max_depth = 20;
  const ExtractionResult r = Viper(env, *oracle, cfg);
  const auto tree = std::make_shared<const DecisionTree>(r.best);
  const double reward = MeanReward(env, TreePolicy(tree), 50, 515151);
  const double secs = Seconds(t0);
  std::ostringstream d;
  d << r.best.node_count() << " nodes, mean reward " << reward << "/250 over 50 rollouts, " << secs
    << " s";
  return {reward >= 250.0 && secs < 300.0, d.str()};
}

// 5. Toy-Pong correctness: counterexample replay, simulation of safe verdicts,
// external solver agreement.
struct PongInstance {
  std::string name;
  ToyPongParams params;
  SafetySpec spec;
  Eigen::VectorXd lo, hi;  // bounding box of the initial set
};

CriterionResult ToyPongCorrectness() {
  const auto t0 = Clock::now();
  const DecisionTree stay = DecisionTree::ConstantLeaf(5, kPaddleStay);
  ToyPongParams short_paddle;
  ToyPongParams long_paddle;
  long_paddle.half_paddle = 4.5;
  std::vector<PongInstance> instances;
  auto add = [&](const std::string& name, const ToyPongParams& p, ToyPongRegion region) {
    PongInstance inst{name, p, ToyPongSpec(p, region), Eigen::VectorXd(5), Eigen::VectorXd(5)};
    if (region == ToyPongRegion::kFull) {
      inst.lo << 0.0, p.y_max / 2, -p.v_max, -p.v_max, 0.0;
      inst.hi << p.x_max, p.y_max, p.v_max, -p.v_min, p.x_max;
    } else {
      inst.lo << 10.5, p.y_max / 2, 0.0, -p.v_max, 15.0;
      inst.hi << 19.5, p.y_max, 0.0, -p.v_min, 15.0;
    }
    instances.push_back(std::move(inst));
  };
  add("stay/full/L=4", short_paddle, ToyPongRegion::kFull);
  add("stay/centered/L=4", short_paddle, ToyPongRegion::kCentered);
  add("stay/centered/L=4.5", long_paddle, ToyPongRegion::kCentered);

  bool ok = true;
  std::ostringstream d;
  const std::optional<std::string> solver = SolverCommandFromEnv();
  int safe_count = 0;
  std::int64_t simulated_steps = 0;
  for (const PongInstance& inst : instances) {
    if (inst.spec.t_max != 40) ok = false;
    const Verdict v = ReachCheck(ToyPongClosedLoop(inst.params, stay), inst.spec);
    d << inst.name << ": " << OutcomeName(v.outcome);
    const StepFunction step = ToyPongTreeStep(inst.params, stay);
    if (v.outcome == Outcome::kCounterexample) {
      const bool replay = ReplayCounterexample(v.trace[0], step, inst.spec);
      d << " (replay " << (replay ? "ok" : "FAILED") << ")";
      ok = ok && replay;
    } else if (v.outcome == Outcome::kSafe) {
      ++safe_count;
      // Every run lasts t_max steps; draw enough runs for 10^6 steps.
      Rng rng(9000 + safe_count);
      int violations = 0;
      std::int64_t steps = 0;
      while (steps < 1'000'000) {
        StateVector s0(5);
        for (int i = 0; i < 5; ++i) s0[i] = UniformIn(rng, inst.lo[i], inst.hi[i]);
        if (!inst.spec.initial.Contains(s0)) continue;
        if (ReplayCounterexample(s0, step, inst.spec)) ++violations;
        steps += inst.spec.t_max;
      }
      simulated_steps += steps;
      d << " (" << steps << " simulated steps, " << violations << " violations)";
      ok = ok && violations == 0;
    } else {
      ok = false;
    }
    if (solver) {
      const SolverResult sr =
          RunSolver(EncodeSmtLib(ToyPongClosedLoop(inst.params, stay), inst.spec), *solver);
      const bool agree = (sr.status == SolverStatus::kSat && v.outcome == Outcome::kCounterexample) ||
                         (sr.status == SolverStatus::kUnsat && v.outcome == Outcome::kSafe);
      d << " solver " << (sr.status == SolverStatus::kSat     ? "sat"
                          : sr.status == SolverStatus::kUnsat ? "unsat"
                                                              : "unknown/error")
        << (agree ? " agrees" : " DISAGREES");
      ok = ok && agree;
    }
    d << "; ";
  }
  // (a) needs the stationary counterexample, (b) at least one safe instance.
  ok = ok && safe_count > 0 && simulated_steps >= 1'000'000;
  if (!solver) d << "external solver not configured (VPK_SOLVER_CMD unset); ";
  const double secs = Seconds(t0);
  d << secs << " s";
  return {ok && secs < 600.0, d.str()};
}

// 6. Bounded correctness of the cart-pole tree from 3.
CriterionResult CartPoleCorrectness() {
  if (!g_cartpole_tree) return {false, "no tree from criterion 3"};
  const auto t0 = Clock::now();
  CartPoleParams p;
  const Verdict v = CartPoleBoundedCheck(p, *g_cartpole_tree, 0.2094, 10);
  const double secs = Seconds(t0);
  std::ostringstream d;
  d << OutcomeName(v.outcome) << " for T_max=10, y0=0.2094, S0=[-" << p.init_range << ", "
    << p.init_range << "]^4, " << v.nodes << " feasibility checks, " << secs << " s";
  return {v.outcome == Outcome::kSafe && secs < 60.0, d.str()};
}

// 7. Robustness radius versus a brute-force grid oracle.
DecisionTree RandomTree(Rng& rng, int points) {
  std::vector<StateVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < points; ++i) {
    xs.push_back(Eigen::Vector2d(UniformIn(rng, -2, 2), UniformIn(rng, -2, 2)));
    ys.push_back(static_cast<int>(rng() % 3));
  }
  TreeConfig cfg;
  cfg.max_depth = 40;
  return FitClassifier(xs, ys, cfg);
}

// Expanding square rings of grid points around s0 until one changes the action.
double GridEpsilon(const DecisionTree& tree, const Eigen::Vector2d& s0, double h) {
  const int a0 = tree.Predict(s0).index();
  for (int r = 1; r < 100'000; ++r) {
    for (int i = -r; i <= r; ++i) {
      for (int j = -r; j <= r; ++j) {
        if (std::max(std::abs(i), std::abs(j)) != r) continue;
        if (tree.Predict(s0 + h * Eigen::Vector2d(i, j)).index() != a0) return r * h;
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

CriterionResult RobustnessExactness() {
  const auto t0 = Clock::now();
  Rng rng(777);
  const double h = 0.005;
  double worst_gap = 0.0, worst_ms = 0.0;
  int max_nodes = 0;
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    // Random labels give roughly one node per training point.
    int points = 20 + static_cast<int>(rng() % 981);
    DecisionTree tree = RandomTree(rng, points);
    while (tree.node_count() > 1000) tree = RandomTree(rng, points -= 25);
    max_nodes = std::max(max_nodes, tree.node_count());
    const Eigen::Vector2d s0(UniformIn(rng, -2, 2), UniformIn(rng, -2, 2));
    const auto q0 = Clock::now();
    const RobustnessResult r = EpsilonRobustness(tree, s0);
    worst_ms = std::max(worst_ms, 1e3 * Seconds(q0));
    const double grid = GridEpsilon(tree, s0, h);
    if (std::isinf(r.epsilon) != std::isinf(grid)) {
      ok = false;
      continue;
    }
    if (!std::isinf(grid)) worst_gap = std::max(worst_gap, std::abs(grid - r.epsilon));
  }
  std::ostringstream d;
  d << "max |eps - grid| = " << worst_gap << " (grid step " << h << "), trees up to " << max_nodes
    << " nodes, slowest query " << worst_ms << " ms, " << Seconds(t0) << " s";
  return {ok && worst_gap <= 0.01 && worst_ms < 50.0, d.str()};
}

// 8. VIPER versus DAgger tree sizes on duel Pong.
CriterionResult SizeComparison() {
  const auto t0 = Clock::now();
  DuelPongEnv env;
  const auto oracle = MakeOracle("expert", env);
  SweepConfig sc;
  sc.extraction.iterations = 10;
  sc.extraction.rollouts = 5;
  sc.extraction.eval_rollouts = 5;
  for (int depth = 4; depth <= 16; ++depth) sc.depths.push_back(depth);
  sc.seeds = {0, 1, 2, 3, 4};
  sc.eval_rollouts = 20;
  const std::vector<SweepPoint> points = RunSweep(env, *oracle, sc);
  const std::vector<ThresholdRow> rows = CompareAtThresholds(points);
  bool ok = !rows.empty();
  std::ostringstream d;
  d << rows.size() << " common thresholds;";
  for (const ThresholdRow& row : rows) {
    d << " R>=" << row.threshold << ": " << row.viper_median_nodes << " vs "
      << row.dagger_median_nodes;
    if (row.viper_median_nodes > row.dagger_median_nodes) {
      ok = false;
      d << " (VIPER larger)";
    }
    d << ";";
  }
  const double secs = Seconds(t0);
  d << " " << secs << " s";
  return {ok && secs < 1800.0, d.str()};
}

// 9. Region of attraction of the iLQR-extracted 3-node linear-leaf tree.
CriterionResult Stability() {
  CartPoleParams p;
  p.continuous_actions = true;
  CartPoleEnv env(p);
  const auto oracle = MakeOracle("ilqr", env);
  ExtractionConfig cfg;
  cfg.iterations = 5;
  cfg.rollouts = 5;
  cfg.seed = 3;
  cfg.eval_rollouts = 10;
  cfg.tree.max_depth = 1;
  cfg.tree.leaf_kind = LeafKind::kLinear;
  cfg.tree.origin_margin = 0.22;
  cfg.tree.fit_intercept = false;
  const ExtractionResult r = Viper(env, *oracle, cfg);
  // Highest-reward candidate with a split; earliest on ties.
  int pick = -1;
  for (int i = 0; i < static_cast<int>(r.candidates.size()); ++i) {
    if (r.candidates[i].node_count() != 3) continue;
    if (pick < 0 || r.report[i].mean_eval_reward > r.report[pick].mean_eval_reward) pick = i;
  }
  if (pick < 0) return {false, "no 3-node candidate was extracted"};
  const DecisionTree& tree = r.candidates[pick];

  const PolynomialMap f_env = CartPoleTaylor(p, 5);
  const auto t0 = Clock::now();
  const StabilityResult roa = TreeRoa(tree, f_env);
  const double cert_secs = Seconds(t0);
  if (!roa.certificate) return {false, "no certificate: " + roa.message};
  const StabilityCertificate& c = *roa.certificate;
  const bool cube = SublevelContainsCube(c.P, c.rho, 0.01);

  // Uniform samples of {V <= rho}: s = sqrt(rho) L^-T u with P = L L'.
  const Eigen::LLT<Eigen::MatrixXd> llt(c.P);
  const Eigen::MatrixXd map = std::sqrt(c.rho) * llt.matrixU().solve(Eigen::MatrixXd::Identity(4, 4));
  Rng rng(99);
  std::normal_distribution<double> normal;
  auto sample = [&] {
    Eigen::Vector4d u;
    for (int i = 0; i < 4; ++i) u[i] = normal(rng);
    u *= std::pow(Uniform01(rng), 0.25) / u.norm();
    return Eigen::VectorXd(map * u);
  };
  auto force = [&](const Eigen::VectorXd& s) { return CartPoleForce(p, tree.Predict(s)); };
  int nonneg = 0, outside = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const Eigen::VectorXd s = sample();
    if (!c.InRegion(s)) {
      ++outside;
      continue;
    }
    const double vdot = 2.0 * s.dot(c.P * CartPoleDerivative(p, s, force(s)));
    if (vdot >= 0.0) ++nonneg;
  }
  int diverged = 0;
  double worst_final = 0.0;
  for (int i = 0; i < 1000; ++i) {
    StateVector s = sample();
    for (int t = 0; t < 2000; ++t) s = CartPoleStep(p, s, force(s));
    const double final_norm = s.lpNorm<Eigen::Infinity>();
    worst_final = std::max(worst_final, final_norm);
    if (!(final_norm < 1e-3)) ++diverged;
  }

  // Baseline: grid points spaced at the excluded radius delta, so that the
  // grid resolves the same scale as the certificate. Timed on a prefix and
  // extrapolated to the full grid; the prefix points sit outside the
  // ellipsoid and are the cheapest ones, so this underestimates the baseline.
  const PolynomialMap closed = CloseLoop(f_env, tree.nodes()[c.leaf_node].coef);
  const auto b0 = Clock::now();
  const CertifyResult again = CertifyRegion(c.P, closed, c.rho);
  const double bb_secs = Seconds(b0);
  const std::int64_t prefix = 2'000'000;
  const auto e0 = Clock::now();
  const EnumerativeResult e = EnumerativeCheck(c.P, closed, c.rho, c.delta, c.delta, prefix);
  const double enum_secs = Seconds(e0) * static_cast<double>(e.grid_points) / e.evaluated;
  const double ratio = enum_secs / bb_secs;

  std::ostringstream d;
  d << "tree " << TreeToJson(tree).dump() << "; rho=" << c.rho << " (" << roa.total_boxes
    << " boxes, " << cert_secs << " s), contains |s|_inf<=0.01: " << (cube ? "yes" : "no")
    << "; " << nonneg << " of " << (1'000'000 - outside)
    << " samples with Vdot>=0; " << diverged << " of 1000 trajectories not within 1e-3 after 2000 "
    << "steps (worst " << worst_final << "); enumerative grid " << e.grid_points
    << " points, est. " << enum_secs << " s vs branch-and-bound " << bb_secs << " s (" << ratio
    << "x)";
  const bool ok = c.rho > 0.0 && cube && again.certified() && nonneg == 0 && outside == 0 &&
                  diverged == 0 && cert_secs < 300.0 && ratio >= 10.0;
  return {ok, d.str()};
}

// 10. Repair: root guard and paddle-length patches.
CriterionResult Repair() {
  const auto t0 = Clock::now();
  const DecisionTree stay = DecisionTree::ConstantLeaf(5, kPaddleStay);
  ToyPongParams params;
  std::ostringstream d;
  bool ok = true;

  const Verdict cex = ReachCheck(ToyPongClosedLoop(params, stay),
                                 ToyPongSpec(params, ToyPongRegion::kFull));
  if (cex.outcome != Outcome::kCounterexample) return {false, "no counterexample to repair"};
  const RepairReport guard = RepairToyPong(params, stay, ToyPongRegion::kFull,
                                           RootGuardFromCounterexample(cex));
  d << "root guard: " << OutcomeName(guard.before.outcome) << " -> "
    << OutcomeName(guard.after.outcome) << ", nodes " << stay.node_count() << " -> "
    << guard.tree.node_count();
  ok = ok && guard.tree.node_count() == stay.node_count() + 2 &&
       guard.before.outcome == Outcome::kCounterexample &&
       (guard.after.outcome != Outcome::kCounterexample || guard.remaining_replays);

  const RepairReport longer =
      RepairToyPong(params, stay, ToyPongRegion::kFull, ParamPatch{"L", 4.5});
  d << "; L=9/2 (full start set): " << OutcomeName(longer.before.outcome) << " -> "
    << OutcomeName(longer.after.outcome);
  ok = ok && (longer.after.outcome != Outcome::kCounterexample || longer.remaining_replays);

  // Known-safe configuration: straight drops over the paddle.
  const RepairReport centered =
      RepairToyPong(params, stay, ToyPongRegion::kCentered, ParamPatch{"L", 4.5});
  d << "; L=9/2 (centered start set): " << OutcomeName(centered.before.outcome) << " -> "
    << OutcomeName(centered.after.outcome) << (centered.verdict_changed ? " (changed)" : "");
  ok = ok && centered.before.outcome == Outcome::kCounterexample &&
       centered.after.outcome == Outcome::kSafe && centered.verdict_changed;
  d << "; " << Seconds(t0) << " s";
  return {ok, d.str()};
}

}  // namespace
}  // namespace vpk

// Optional arguments select criteria by number, e.g. "7 9".
int main(int argc, char** argv) {
  using vpk::CriterionResult;
  const std::vector<std::pair<const char*, std::function<CriterionResult()>>> criteria = {
      {"loss identity on random MDPs", vpk::LossIdentity},
      {"chain MDP values", vpk::ChainValues},
      {"cart-pole extraction", vpk::CartPoleExtraction},
      {"toy Pong extraction", vpk::ToyPongExtraction},
      {"toy Pong correctness cross-validation", vpk::ToyPongCorrectness},
      {"cart-pole bounded correctness", vpk::CartPoleCorrectness},
      {"robustness exactness", vpk::RobustnessExactness},
      {"VIPER vs DAgger tree size", vpk::SizeComparison},
      {"stability certification", vpk::Stability},
      {"repair workflow", vpk::Repair},
  };
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n >= 1 && n <= static_cast<int>(criteria.size())) selected[n - 1] = true;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    CriterionResult o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << " ["
              << criteria[i].first << "] " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
