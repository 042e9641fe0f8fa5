#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "vpk/environment.h"
#include "vpk/polynomial.h"

namespace vpk {

/// Classic cart-pole benchmark. State order: (x, v, theta, omega).
struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_half_length = 0.5;
  double force_mag = 10.0;
  double dt = 0.02;
  double angle_limit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  double x_limit = 2.4;
  int max_steps = 200;
  /// Continuous actions are forces clipped to [-action_limit, action_limit];
  /// discrete actions are {0: -force_mag, 1: +force_mag}.
  bool continuous_actions = false;
  double action_limit = 10.0;
  /// Initial states are drawn uniformly from [-init_range, init_range]^4.
  double init_range = 0.05;

  /// Throws std::invalid_argument on nonpositive masses, lengths or dt, or an
  /// angle limit outside (0, pi/2).
  void Validate() const;
  nlohmann::json ToJson() const;
  static CartPoleParams FromJson(const nlohmann::json& j);
};

enum CartPoleState { kCartX = 0, kCartV = 1, kPoleTheta = 2, kPoleOmega = 3 };

/// Right-hand side of the continuous dynamics: (v, x_acc, omega, theta_acc).
Eigen::Vector4d CartPoleDerivative(const CartPoleParams& params,
                                   const Eigen::Ref<const Eigen::VectorXd>& s,
                                   double force);

/// One semi-implicit Euler step: velocities first, then positions with the
/// updated velocities. Throws std::runtime_error on a non-finite result.
StateVector CartPoleStep(const CartPoleParams& params,
                         const Eigen::Ref<const Eigen::VectorXd>& s,
                         double force);

/// Maps an action to a force: discrete index 0/1 to -/+force_mag; continuous
/// values pass through clipped to the action limit.
double CartPoleForce(const CartPoleParams& params, const Action& a);

struct LinearModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

struct CartPoleLinearization {
  LinearModel continuous;
  /// (I + dt A, dt B).
  LinearModel discrete;
};

/// Analytic Jacobians of the continuous dynamics at the upright equilibrium.
CartPoleLinearization CartPoleLinearize(const CartPoleParams& params);

/// Taylor expansion of the continuous dynamics about 0 as a polynomial map in
/// (x, v, theta, omega, a). Supported degrees are 1, 3 and 5.
PolynomialMap CartPoleTaylor(const CartPoleParams& params, int degree);

class CartPoleEnv final : public Environment {
 public:
  explicit CartPoleEnv(CartPoleParams params = {});

  std::string id() const override { return "cartpole"; }
  int state_dim() const override { return 4; }
  ActionSpace action_space() const override;
  int max_steps() const override { return params_.max_steps; }
  StateVector Reset(std::uint64_t seed) override;
  void SetState(const StateVector& s) override;
  const StateVector& state() const override { return state_; }
  StepResult Step(const Action& a) override;
  std::unique_ptr<Environment> Clone() const override;

  const CartPoleParams& params() const { return params_; }
  bool IsFailure(const Eigen::Ref<const Eigen::VectorXd>& s) const;

 private:
  CartPoleParams params_;
  StateVector state_;
};

}  // namespace vpk
