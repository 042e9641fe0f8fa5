#include "vpk/correctness_problems.h"

#include <cmath>
#include <stdexcept>

namespace vpk {

namespace {


Polytope ToyPongUnsafe() {
  return {5, {LinearConstraint::Upper(5, kBallY, 0.0),
              LinearConstraint::Upper(5, kBallVy, 0.0, true)}};
}

Polytope ToyPongTarget() { return {5, {LinearConstraint::Lower(5, kBallVy, 0.0, true)}}; }

}  // namespace

SafetySpec ToyPongSafetySpec(const ToyPongParams& params) {
  params.Validate();
  Eigen::VectorXd lo(5), hi(5);
  lo << 0.0, params.y_max / 2, -params.v_max, -params.v_max, 0.0;
  hi << params.x_max, params.y_max, params.v_max, -params.v_min, params.x_max;
  SafetySpec spec;
  spec.initial = Polytope::Box(lo, hi);
  spec.target = {ToyPongTarget()};
  spec.unsafe = {ToyPongUnsafe()};
  spec.t_max = ToyPongHorizon(params);
  spec.mode = SpecMode::kInvariant;
  return spec;
}

SafetySpec ToyPongCenteredSpec(const ToyPongParams& params) {
  SafetySpec spec = ToyPongSafetySpec(params);
  Eigen::VectorXd lo(5), hi(5);
  lo << 10.5, params.y_max / 2, 0.0, -params.v_max, 15.0;
  hi << 19.5, params.y_max, 0.0, -params.v_min, 15.0;
  spec.initial = Polytope::Box(lo, hi);
  return spec;
}

PiecewiseAffineSystem ToyPongClosedLoop(const ToyPongParams& params, const DecisionTree& tree) {
  return ComposeClosedLoop(ToyPongPwa(params), tree);
}

StepFunction ToyPongTreeStep(const ToyPongParams& params, const DecisionTree& tree) {
  return [params, tree](const StateVector& s) {
    return ToyPongStep(params, s, tree.Predict(s).index()).state;
  };
}

PiecewiseAffineSystem CartPoleLinearClosedLoop(const CartPoleParams& params,
                                               const DecisionTree& tree) {
  if (tree.leaf_kind() != LeafKind::kDiscrete || tree.dim() != 4) {
    throw std::invalid_argument("cart-pole bounded check needs a 4-d discrete-leaf tree");
  }
  const LinearModel lin = CartPoleLinearize(params).discrete;
  PiecewiseAffineSystem open(4);
  for (int a = 0; a < 2; ++a) {
    AffinePiece piece;
    piece.M = lin.A;
    piece.c = lin.B.col(0) * CartPoleForce(params, Action::Discrete(a));
    piece.action = a;
    piece.label = a == 0 ? "push_left" : "push_right";
    open.AddPiece(std::move(piece));
  }
  return ComposeClosedLoop(open, tree);
}

SafetySpec CartPoleSafetySpec(const CartPoleParams& params, double y0, int t_max) {
  if (!(y0 >= 0.0) || !std::isfinite(y0)) throw std::invalid_argument("y0 must be finite and >= 0");
  const Eigen::VectorXd r = Eigen::VectorXd::Constant(4, params.init_range);
  SafetySpec spec;
  spec.initial = Polytope::Box(-r, r);
  spec.unsafe = {Polytope{4, {LinearConstraint::Lower(4, kPoleTheta, y0, true)}},
                 Polytope{4, {LinearConstraint::Upper(4, kPoleTheta, -y0, true)}}};
  spec.t_max = t_max;
  spec.mode = SpecMode::kUnsafe;
  return spec;
}

StepFunction CartPoleLinearTreeStep(const CartPoleParams& params, const DecisionTree& tree) {
  const LinearModel lin = CartPoleLinearize(params).discrete;
  return [params, tree, lin](const StateVector& s) -> StateVector {
    return lin.A * s + lin.B.col(0) * CartPoleForce(params, tree.Predict(s));
  };
}

Verdict CartPoleBoundedCheck(const CartPoleParams& params, const DecisionTree& tree, double y0,
                             int t_max, const ReachOptions& options) {
  const SafetySpec spec = CartPoleSafetySpec(params, y0, t_max);
  Verdict v = ReachCheck(CartPoleLinearClosedLoop(params, tree), spec, options);
  if (v.outcome == Outcome::kCounterexample) {
    v.replay_ok = ReplayCounterexample(v.trace.front(), CartPoleLinearTreeStep(params, tree), spec);
  }
  return v;
}

}  // namespace vpk
