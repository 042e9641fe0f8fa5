#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "vpk/cartpole.h"
#include "vpk/lqr.h"
#include "vpk/oracle.h"

namespace vpk {

/// Discrete-time model s' = f(s, a) with a scalar control.
using ScalarControlModel =
    std::function<StateVector(const Eigen::Ref<const Eigen::VectorXd>&, double)>;

struct IlqrConfig {
  int horizon = 50;
  int iterations = 3;
  double fallback_radius = 0.05;
  /// Central-difference step for the model Jacobians.
  double fd_step = 1e-5;
  Eigen::MatrixXd Qc;
  Eigen::MatrixXd Rc;
};

struct IlqrResult {
  std::vector<StateVector> states;
  std::vector<double> controls;
  /// Total cost after the initial rollout and after each iteration.
  std::vector<double> cost_trace;
  /// Half the cost-to-go Hessian at t = 1 from the last backward pass: the
  /// quadratic value model for the successor of the first step.
  Eigen::MatrixXd P1;
};

/// Iterative LQR from `s0`, warm-started with the linear law `-K s`. The
/// terminal cost is s' P_T s. Each iteration accepts a line-search step only
/// if it does not increase the cost, so cost_trace is non-increasing. Throws
/// std::runtime_error with the cost trace if no finite step exists.
IlqrResult IlqrSolve(const ScalarControlModel& model, const StateVector& s0,
                     const Eigen::MatrixXd& K, const Eigen::MatrixXd& P_T,
                     const IlqrConfig& config);

/// Receding-horizon iLQR controller for cart-pole. Inside the fallback radius
/// (max-norm) the action is the LQR law -K s. Q(s, a) = -s'^T P s' where s' is
/// the state after applying a and P is the replanned cost-to-go (or the LQR P
/// inside the fallback radius). Discrete action spaces use the admissible
/// force nearest to the planned one.
class IlqrOracle final : public Oracle {
 public:
  IlqrOracle(CartPoleParams params, IlqrConfig config);

  ActionSpace action_space() const override;
  Action Act(const StateVector& s) const override;
  double QValue(const StateVector& s, const Action& a) const override;

  /// The planned continuous force at s before discretization or clipping.
  double PlannedForce(const StateVector& s) const;
  const LqrSolution& lqr() const { return lqr_; }
  const IlqrConfig& config() const { return config_; }

 private:
  Eigen::MatrixXd CostToGo(const StateVector& s) const;

  CartPoleParams params_;
  IlqrConfig config_;
  LqrSolution lqr_;
};

/// Default iLQR weights: Q_c = diag(1, 1, 10, 1), R_c = 0.1.
IlqrConfig DefaultIlqrConfig();

}  // namespace vpk
