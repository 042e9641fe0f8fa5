#include <cmath>
#include <regex>

#include <gtest/gtest.h>

#include "vpk/cartpole.h"
#include "vpk/correctness_problems.h"
#include "vpk/decision_tree.h"
#include "vpk/reachability.h"
#include "vpk/smtlib.h"
#include "vpk/toypong.h"
#include "vpk/types.h"

namespace vpk {
namespace {

PiecewiseAffineSystem Scalar(double a, double c = 0.0) {
  PiecewiseAffineSystem sys(1);
  sys.AddPiece({{}, Eigen::MatrixXd::Constant(1, 1, a), Eigen::VectorXd::Constant(1, c)});
  return sys;
}

Polytope Interval1(double lo, double hi) {
  return Polytope::Box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi));
}

Polytope AtLeast(int dim, int coord, double bound) {
  Polytope p = Polytope::Universe(dim);
  p.constraints.push_back(LinearConstraint::Lower(dim, coord, bound));
  return p;
}

double Quarter(Rng& rng, int range) {
  return static_cast<double>(static_cast<int>(rng() % (2 * range + 1)) - range) / 4.0;
}

// Two pieces split on x0 <= 0 with random affine maps on a quarter grid.
PiecewiseAffineSystem RandomPwa(Rng& rng) {
  PiecewiseAffineSystem sys(2);
  for (int side = 0; side < 2; ++side) {
    AffinePiece p;
    p.guard = {side == 0 ? LinearConstraint::Upper(2, 0, 0.0) : LinearConstraint::Lower(2, 0, 0.0, true)};
    p.M.resize(2, 2);
    p.c.resize(2);
    for (int i = 0; i < 2; ++i) {
      p.c[i] = Quarter(rng, 2);
      for (int j = 0; j < 2; ++j) p.M(i, j) = Quarter(rng, 5);
    }
    sys.AddPiece(p);
  }
  return sys;
}

StepFunction StepOf(const PiecewiseAffineSystem& sys) {
  return [sys](const StateVector& s) { return sys.Step(s); };
}

TEST(ReachCheckTest, ContractionIsSafe) {
  SafetySpec spec;
  spec.initial = Interval1(-1, 1);
  spec.unsafe = {AtLeast(1, 0, 1.5)};
  spec.t_max = 20;
  const Verdict v = ReachCheck(Scalar(0.5), spec);
  EXPECT_EQ(v.outcome, Outcome::kSafe);
  EXPECT_EQ(OutcomeName(v.outcome), "safe");
}

TEST(ReachCheckTest, InitialInsideUnsafeFailsAtStepZero) {
  SafetySpec spec;
  spec.initial = Interval1(0, 1);
  spec.unsafe = {AtLeast(1, 0, 0.5)};
  spec.t_max = 3;
  const Verdict v = ReachCheck(Scalar(1.0), spec);
  ASSERT_EQ(v.outcome, Outcome::kCounterexample);
  EXPECT_EQ(v.violation_step, 0);
  EXPECT_EQ(v.reason, "unsafe");
  EXPECT_GE(v.trace[0][0], 0.5);
}

TEST(ReachCheckTest, ExpansionHitsUnsafeAtTheRightStep) {
  // x' = 2x from [0, 1/8]: x_t = 2^t x_0 first reaches 1 at t = 3.
  SafetySpec spec;
  spec.initial = Interval1(0, 0.125);
  spec.unsafe = {AtLeast(1, 0, 1.0)};
  spec.t_max = 2;
  EXPECT_EQ(ReachCheck(Scalar(2.0), spec).outcome, Outcome::kSafe);
  spec.t_max = 3;
  const Verdict v = ReachCheck(Scalar(2.0), spec);
  ASSERT_EQ(v.outcome, Outcome::kCounterexample);
  EXPECT_EQ(v.violation_step, 3);
  ASSERT_EQ(v.trace.size(), 4u);
  EXPECT_EQ(v.trace[0][0], 0.125);
  EXPECT_EQ(v.initial_exact, std::vector<std::string>{"1/8"});
  EXPECT_TRUE(ReplayCounterexample(v.trace[0], StepOf(Scalar(2.0)), spec));
}

TEST(ReachCheckTest, StrictUnsafeBoundaryIsExact) {
  // x' = 2x from [0, 1/2] never exceeds 1 strictly at t = 1.
  SafetySpec spec;
  spec.initial = Interval1(0, 0.5);
  Polytope strict = Polytope::Universe(1);
  strict.constraints.push_back(LinearConstraint::Lower(1, 0, 1.0, true));
  spec.unsafe = {strict};
  spec.t_max = 1;
  EXPECT_EQ(ReachCheck(Scalar(2.0), spec).outcome, Outcome::kSafe);
}

TEST(ReachCheckTest, InvariantModeTargetMissed) {
  // x' = x + 1 from [0, 2] reaches x >= 3 by t = 3 for every start, but not
  // by t = 2 for starts below 1.
  SafetySpec spec;
  spec.initial = Interval1(0, 2);
  spec.target = {AtLeast(1, 0, 3.0)};
  spec.mode = SpecMode::kInvariant;
  spec.t_max = 3;
  EXPECT_EQ(ReachCheck(Scalar(1.0, 1.0), spec).outcome, Outcome::kSafe);
  spec.t_max = 2;
  const Verdict v = ReachCheck(Scalar(1.0, 1.0), spec);
  ASSERT_EQ(v.outcome, Outcome::kCounterexample);
  EXPECT_EQ(v.reason, "target not reached");
  EXPECT_EQ(v.violation_step, 2);
  EXPECT_LT(v.trace[0][0], 1.0);
  EXPECT_TRUE(ReplayCounterexample(v.trace[0], StepOf(Scalar(1.0, 1.0)), spec));
}

TEST(ReachCheckTest, InvariantModeTargetAtStepZeroDoesNotCount) {
  SafetySpec spec;
  spec.initial = Interval1(5, 6);
  spec.target = {AtLeast(1, 0, 3.0)};
  spec.mode = SpecMode::kInvariant;
  spec.t_max = 1;
  EXPECT_EQ(ReachCheck(Scalar(0.0), spec).outcome, Outcome::kCounterexample);
}

TEST(ReachCheckTest, BudgetIsReported) {
  SafetySpec spec;
  spec.initial = Interval1(-1, 1);
  spec.unsafe = {AtLeast(1, 0, 100.0)};
  spec.t_max = 30;
  ReachOptions opt;
  opt.node_budget = 5;
  EXPECT_EQ(ReachCheck(Scalar(0.5), spec, opt).outcome, Outcome::kBudgetExceeded);
}

TEST(ReachCheckTest, SpecValidation) {
  SafetySpec spec;
  spec.initial = Interval1(0, 1);
  spec.t_max = 0;
  EXPECT_THROW(ReachCheck(Scalar(1.0), spec), std::invalid_argument);
  spec.t_max = 1;
  spec.unsafe = {AtLeast(2, 0, 1.0)};
  EXPECT_THROW(ReachCheck(Scalar(1.0), spec), std::invalid_argument);
}

// Grid simulation is an under-approximation of the reachable runs: any grid
// violation must be found, and every reported trace must replay.
TEST(ReachCheckTest, AgreesWithGridSimulationOnRandomSystems) {
  Rng rng(31);
  int counterexamples = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const PiecewiseAffineSystem sys = RandomPwa(rng);
    SafetySpec spec;
    spec.initial = Polytope::Box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    spec.unsafe = {AtLeast(2, 0, 2.0)};
    spec.t_max = 3;
    if (trial % 2 == 1) {
      spec.mode = SpecMode::kInvariant;
      spec.target = {AtLeast(2, 1, 1.0)};
    }
    bool grid_violation = false;
    for (int i = -20; i <= 20 && !grid_violation; ++i) {
      for (int j = -20; j <= 20 && !grid_violation; ++j) {
        grid_violation = ReplayCounterexample(Eigen::Vector2d(i / 20.0, j / 20.0), StepOf(sys), spec);
      }
    }
    const Verdict v = ReachCheck(sys, spec);
    ASSERT_NE(v.outcome, Outcome::kBudgetExceeded);
    if (grid_violation) EXPECT_EQ(v.outcome, Outcome::kCounterexample) << "trial " << trial;
    if (v.outcome == Outcome::kCounterexample) {
      ++counterexamples;
      EXPECT_TRUE(spec.initial.Contains(v.trace[0]));
      if (v.witness_margin > 0) EXPECT_TRUE(ReplayCounterexample(v.trace[0], StepOf(sys), spec)) << trial;
      for (std::size_t t = 0; t + 1 < v.trace.size(); ++t) {
        const StateVector next = sys.pieces()[v.piece_path[t]].Apply(v.trace[t]);
        EXPECT_LT((next - v.trace[t + 1]).norm(), 1e-9);
      }
    }
  }
  EXPECT_GT(counterexamples, 5);
  EXPECT_LT(counterexamples, 55);
}

DecisionTree RandomToyPongTree(Rng& rng, int leaves) {
  std::vector<StateVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd s(5);
    s << UniformIn(rng, 0, 30), UniformIn(rng, 0, 20), UniformIn(rng, -2, 2), UniformIn(rng, -2, 2),
        UniformIn(rng, 0, 30);
    xs.push_back(s);
    ys.push_back(static_cast<int>(rng() % 3));
  }
  TreeConfig cfg;
  cfg.max_depth = leaves;
  return FitClassifier(xs, ys, cfg);
}

TEST(ComposeClosedLoopTest, MatchesTreeAndSimulator) {
  Rng rng(12);
  const ToyPongParams params;
  const DecisionTree tree = RandomToyPongTree(rng, 3);
  const PiecewiseAffineSystem env = ToyPongPwa(params);
  const PiecewiseAffineSystem loop = ComposeClosedLoop(env, tree);
  std::size_t bound = 0;
  for (const LeafRegion& r : tree.LeafRegions()) {
    for (const AffinePiece& p : env.pieces()) bound += p.action == r.action ? 1 : 0;
  }
  EXPECT_LE(loop.pieces().size(), bound);
  for (const AffinePiece& p : loop.pieces()) EXPECT_EQ(p.action, -1);
  const auto q = [](double x) { return std::round(x * 1048576.0) / 1048576.0; };
  for (int i = 0; i < 100000; ++i) {
    Eigen::VectorXd s(5);
    s << q(UniformIn(rng, 0, 30)), q(UniformIn(rng, 0.1, 20)), q(UniformIn(rng, -2, 2)),
        q(UniformIn(rng, -2, 2)), q(UniformIn(rng, 0, 30));
    ASSERT_EQ(loop.MatchingPieces(s).size(), 1u) << s.transpose();
    const StateVector expected = ToyPongStep(params, s, tree.Predict(s).index()).state;
    EXPECT_LT((loop.Step(s) - expected).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(ComposeClosedLoopTest, RejectsLinearTrees) {
  EXPECT_THROW(ComposeClosedLoop(ToyPongPwa({}), DecisionTree::LinearLeaf(Eigen::VectorXd::Zero(5), 0)),
               std::invalid_argument);
  EXPECT_THROW(ComposeClosedLoop(ToyPongPwa({}), DecisionTree::ConstantLeaf(4, 0)), std::invalid_argument);
}

TEST(ToyPongCorrectnessTest, StationaryPaddleCounterexampleReplays) {
  const ToyPongParams params;
  const DecisionTree stay = DecisionTree::ConstantLeaf(5, kPaddleStay);
  const SafetySpec spec = ToyPongSafetySpec(params);
  const Verdict v = ReachCheck(ToyPongClosedLoop(params, stay), spec);
  ASSERT_EQ(v.outcome, Outcome::kCounterexample);
  EXPECT_TRUE(ReplayCounterexample(v.trace[0], ToyPongTreeStep(params, stay), spec));
  ToyPongEnv env(params);
  EXPECT_TRUE(ReplayCounterexample(v.trace, env, stay, spec));
  EXPECT_EQ(v.ToJson().at("outcome"), "counterexample");
}

TEST(ToyPongCorrectnessTest, CorruptedTraceDoesNotReplay) {
  const ToyPongParams params;
  const DecisionTree stay = DecisionTree::ConstantLeaf(5, kPaddleStay);
  const SafetySpec spec = ToyPongCenteredSpec(params);
  ToyPongEnv env(params);
  // Ball straight above the paddle: caught.
  Eigen::VectorXd s(5);
  s << 15, 10, 0, -1, 15;
  EXPECT_FALSE(ReplayCounterexample({s}, env, stay, spec));
  // Outside the initial set.
  s[0] = 2;
  EXPECT_FALSE(ReplayCounterexample({s}, env, stay, spec));
}

TEST(ToyPongCorrectnessTest, CenteredSpecDependsOnPaddleLength) {
  ToyPongParams params;
  const DecisionTree stay = DecisionTree::ConstantLeaf(5, kPaddleStay);
  params.half_paddle = 4.0;
  const Verdict miss = ReachCheck(ToyPongClosedLoop(params, stay), ToyPongCenteredSpec(params));
  ASSERT_EQ(miss.outcome, Outcome::kCounterexample);
  EXPECT_GT(std::abs(miss.trace[0][kBallX] - 15.0), 4.0);
  params.half_paddle = 4.5;
  EXPECT_EQ(ReachCheck(ToyPongClosedLoop(params, stay), ToyPongCenteredSpec(params)).outcome,
            Outcome::kSafe);
}

TEST(CartPoleCorrectnessTest, ZeroAngleBoundFailsImmediately) {
  const CartPoleParams params;
  const Verdict v = CartPoleBoundedCheck(params, DecisionTree::ConstantLeaf(4, 1), 0.0, 5);
  ASSERT_EQ(v.outcome, Outcome::kCounterexample);
  EXPECT_EQ(v.violation_step, 0);
  EXPECT_EQ(v.replay_ok, std::optional<bool>(true));
}

TEST(CartPoleCorrectnessTest, ConstantPushTipsThePole) {
  const CartPoleParams params;
  const DecisionTree push = DecisionTree::ConstantLeaf(4, 1);
  const Verdict v = CartPoleBoundedCheck(params, push, 0.06, 10);
  ASSERT_EQ(v.outcome, Outcome::kCounterexample);
  EXPECT_GT(v.violation_step, 0);
  EXPECT_EQ(v.replay_ok, std::optional<bool>(true));
  EXPECT_GT(std::abs(v.trace.back()[kPoleTheta]), 0.06);
}

TEST(SmtLibTest, DeclaresEveryStateVariable) {
  const ToyPongParams params;
  const SafetySpec spec = ToyPongCenteredSpec(params);
  const std::string smt =
      EncodeSmtLib(ToyPongClosedLoop(params, DecisionTree::ConstantLeaf(5, kPaddleStay)), spec);
  const std::regex decl(R"(\(declare-const s_\d+_\d+ Real\))");
  const auto n = std::distance(std::sregex_iterator(smt.begin(), smt.end(), decl), std::sregex_iterator());
  EXPECT_EQ(n, (spec.t_max + 1) * 5);
  EXPECT_NE(smt.find("(set-logic QF_LRA)"), std::string::npos);
  EXPECT_NE(smt.find("(check-sat)"), std::string::npos);
  EXPECT_EQ(SmtRational(Rational(-3, 4)), "(- (/ 3 4))");
  EXPECT_EQ(SmtRational(Rational(5)), "5");
}

TEST(SmtLibTest, ParsesModels) {
  const SolverResult r = ParseSolverOutput(
      "sat\n(model\n  (define-fun s_0_0 () Real (/ 1.0 8.0))\n  (define-fun tr_0 () Bool true)\n"
      "  (define-fun s_1_0 () Real (- 2.5))\n  (define-fun s_0_1 () Real 3))\n");
  EXPECT_EQ(r.status, SolverStatus::kSat);
  EXPECT_EQ(r.model.at("s_0_0"), Rational(1, 8));
  EXPECT_EQ(r.model.at("s_1_0"), Rational(-5, 2));
  EXPECT_EQ(r.model.count("tr_0"), 0u);
  const auto trace = ModelTrace(r, 2, 1);
  EXPECT_EQ(trace[0][1], 3);
  EXPECT_EQ(trace[1][1], 0);
  EXPECT_EQ(ParseSolverOutput("unsat\n").status, SolverStatus::kUnsat);
  EXPECT_EQ(ParseSolverOutput("unknown\n").status, SolverStatus::kUnknown);
  EXPECT_EQ(ParseSolverOutput("(error \"x\")\n").status, SolverStatus::kError);
}

class SolverTest : public ::testing::Test {
 protected:
  void SetUp() override {
    command_ = SolverCommandFromEnv();
    if (!command_) GTEST_SKIP() << "VPK_SOLVER_CMD is not set";
  }
  std::optional<std::string> command_;
};

TEST_F(SolverTest, AgreesWithReachCheckOnRandomSystems) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const PiecewiseAffineSystem sys = RandomPwa(rng);
    SafetySpec spec;
    spec.initial = Polytope::Box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    spec.unsafe = {AtLeast(2, 0, 2.0)};
    spec.t_max = 3;
    if (trial % 2 == 1) {
      spec.mode = SpecMode::kInvariant;
      spec.target = {AtLeast(2, 1, 1.0)};
    }
    const Verdict v = ReachCheck(sys, spec);
    const SolverResult r = RunSolver(EncodeSmtLib(sys, spec), *command_);
    ASSERT_NE(r.status, SolverStatus::kError) << r.output;
    EXPECT_EQ(r.status == SolverStatus::kSat, v.outcome == Outcome::kCounterexample) << "trial " << trial;
  }
}

TEST_F(SolverTest, StationaryPaddleModelReplays) {
  const ToyPongParams params;
  const DecisionTree stay = DecisionTree::ConstantLeaf(5, kPaddleStay);
  const SafetySpec spec = ToyPongSafetySpec(params);
  const SolverResult r = RunSolver(EncodeSmtLib(ToyPongClosedLoop(params, stay), spec), *command_);
  ASSERT_EQ(r.status, SolverStatus::kSat) << r.output;
  const auto trace = ModelTrace(r, 5, spec.t_max);
  EXPECT_TRUE(ReplayCounterexample(ToDouble(trace[0]), ToyPongTreeStep(params, stay), spec));
}

}  // namespace
}  // namespace vpk
