#include "vpk/cartpole.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vpk {

void CartPoleParams::Validate() const {
  if (!(gravity > 0 && cart_mass > 0 && pole_mass > 0 && pole_half_length > 0 &&
        force_mag > 0 && dt > 0 && x_limit > 0 && action_limit > 0)) {
    throw std::invalid_argument("cart-pole masses, lengths, forces and dt must be positive");
  }
  if (!(angle_limit > 0 && angle_limit < std::numbers::pi / 2)) {
    throw std::invalid_argument("cart-pole angle_limit must lie in (0, pi/2)");
  }
  if (max_steps < 0) throw std::invalid_argument("cart-pole max_steps < 0");
  if (!(init_range >= 0)) throw std::invalid_argument("cart-pole init_range < 0");
}

nlohmann::json CartPoleParams::ToJson() const {
  return {{"gravity", gravity},
          {"cart_mass", cart_mass},
          {"pole_mass", pole_mass},
          {"pole_half_length", pole_half_length},
          {"force_mag", force_mag},
          {"dt", dt},
          {"angle_limit", angle_limit},
          {"x_limit", x_limit},
          {"max_steps", max_steps},
          {"continuous_actions", continuous_actions},
          {"action_limit", action_limit},
          {"init_range", init_range}};
}

CartPoleParams CartPoleParams::FromJson(const nlohmann::json& j) {
  CartPoleParams p;
  p.gravity = j.value("gravity", p.gravity);
  p.cart_mass = j.value("cart_mass", p.cart_mass);
  p.pole_mass = j.value("pole_mass", p.pole_mass);
  p.pole_half_length = j.value("pole_half_length", p.pole_half_length);
  p.force_mag = j.value("force_mag", p.force_mag);
  p.dt = j.value("dt", p.dt);
  p.angle_limit = j.value("angle_limit", p.angle_limit);
  p.x_limit = j.value("x_limit", p.x_limit);
  p.max_steps = j.value("max_steps", p.max_steps);
  p.continuous_actions = j.value("continuous_actions", p.continuous_actions);
  p.action_limit = j.value("action_limit", p.action_limit);
  p.init_range = j.value("init_range", p.init_range);
  p.Validate();
  return p;
}

Eigen::Vector4d CartPoleDerivative(const CartPoleParams& p,
                                   const Eigen::Ref<const Eigen::VectorXd>& s,
                                   double force) {
  if (s.size() != 4) throw std::invalid_argument("cart-pole state must be 4-D");
  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_ml = p.pole_mass * p.pole_half_length;
  const double theta = s[kPoleTheta];
  const double omega = s[kPoleOmega];
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);
  const double temp = (force + pole_ml * omega * omega * sin_t) / total_mass;
  const double theta_acc =
      (p.gravity * sin_t - cos_t * temp) /
      (p.pole_half_length *
       (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;
  return {s[kCartV], x_acc, omega, theta_acc};
}

StateVector CartPoleStep(const CartPoleParams& p,
                         const Eigen::Ref<const Eigen::VectorXd>& s,
                         double force) {
  const Eigen::Vector4d deriv = CartPoleDerivative(p, s, force);
  StateVector next(4);
  next[kCartV] = s[kCartV] + p.dt * deriv[1];
  next[kCartX] = s[kCartX] + p.dt * next[kCartV];
  next[kPoleOmega] = s[kPoleOmega] + p.dt * deriv[3];
  next[kPoleTheta] = s[kPoleTheta] + p.dt * next[kPoleOmega];
  RequireFinite(next, "cart-pole step");
  return next;
}

double CartPoleForce(const CartPoleParams& p, const Action& a) {
  if (a.is_discrete()) {
    switch (a.index()) {
      case 0:
        return -p.force_mag;
      case 1:
        return p.force_mag;
      default:
        throw std::invalid_argument("cart-pole discrete action must be 0 or 1");
    }
  }
  return std::clamp(a.value(), -p.action_limit, p.action_limit);
}

CartPoleLinearization CartPoleLinearize(const CartPoleParams& p) {
  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_ml = p.pole_mass * p.pole_half_length;
  // theta_acc ~ (g theta - a / M) / denom at the upright state.
  const double denom =
      p.pole_half_length * (4.0 / 3.0 - p.pole_mass / total_mass);

  CartPoleLinearization lin;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 1);
  A(kCartX, kCartV) = 1.0;
  A(kPoleTheta, kPoleOmega) = 1.0;
  A(kPoleOmega, kPoleTheta) = p.gravity / denom;
  A(kCartV, kPoleTheta) = -pole_ml / total_mass * p.gravity / denom;
  B(kPoleOmega, 0) = -1.0 / (total_mass * denom);
  B(kCartV, 0) = 1.0 / total_mass + pole_ml / (total_mass * total_mass * denom);
  lin.continuous = {A, B};
  lin.discrete = {Eigen::MatrixXd::Identity(4, 4) + p.dt * A, p.dt * B};
  return lin;
}

PolynomialMap CartPoleTaylor(const CartPoleParams& p, int degree) {
  if (degree != 1 && degree != 3 && degree != 5) {
    throw std::invalid_argument("cart-pole Taylor degree must be 1, 3 or 5");
  }
  constexpr int kVars = 5;  // x, v, theta, omega, a
  const Polynomial v = Polynomial::Variable(kVars, 1);
  const Polynomial theta = Polynomial::Variable(kVars, 2);
  const Polynomial omega = Polynomial::Variable(kVars, 3);
  const Polynomial force = Polynomial::Variable(kVars, 4);

  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_ml = p.pole_mass * p.pole_half_length;

  const Polynomial sin_t = SeriesSin(theta, degree);
  const Polynomial cos_t = SeriesCos(theta, degree);
  const Polynomial temp =
      (force + omega.MultiplyTruncated(omega, degree)
                   .MultiplyTruncated(sin_t, degree) *
                   pole_ml) *
      (1.0 / total_mass);
  // denom = l (4/3 - m cos^2 / M) = c0 + (denom - c0).
  const Polynomial cos_sq = cos_t.MultiplyTruncated(cos_t, degree);
  const Polynomial denom =
      (Polynomial::Constant(kVars, 4.0 / 3.0) - cos_sq * (p.pole_mass / total_mass)) *
      p.pole_half_length;
  const double c0 = denom.coefficient({0, 0, 0, 0, 0});
  const Polynomial inv_denom =
      SeriesReciprocal(c0, denom - Polynomial::Constant(kVars, c0), degree);
  const Polynomial numer =
      sin_t * p.gravity - cos_t.MultiplyTruncated(temp, degree);
  const Polynomial theta_acc = numer.MultiplyTruncated(inv_denom, degree);
  const Polynomial x_acc =
      temp - theta_acc.MultiplyTruncated(cos_t, degree) * (pole_ml / total_mass);

  PolynomialMap map;
  map.dim_in = kVars;
  map.outputs = {v, x_acc.Truncated(degree), omega, theta_acc.Truncated(degree)};
  return map;
}

CartPoleEnv::CartPoleEnv(CartPoleParams params)
    : params_(params), state_(StateVector::Zero(4)) {
  params_.Validate();
}

ActionSpace CartPoleEnv::action_space() const {
  if (params_.continuous_actions) {
    return ActionSpace::Continuous(-params_.action_limit, params_.action_limit);
  }
  return ActionSpace::Discrete(2);
}

StateVector CartPoleEnv::Reset(std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < 4; ++i) {
    state_[i] = UniformIn(rng, -params_.init_range, params_.init_range);
  }
  return state_;
}

void CartPoleEnv::SetState(const StateVector& s) {
  if (s.size() != 4) throw std::invalid_argument("cart-pole state must be 4-D");
  state_ = s;
}

bool CartPoleEnv::IsFailure(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  return std::abs(s[kCartX]) > params_.x_limit ||
         std::abs(s[kPoleTheta]) > params_.angle_limit;
}

StepResult CartPoleEnv::Step(const Action& a) {
  StepResult r;
  state_ = CartPoleStep(params_, state_, CartPoleForce(params_, a));
  r.state = state_;
  r.reward = 1.0;
  r.done = IsFailure(state_);
  return r;
}

std::unique_ptr<Environment> CartPoleEnv::Clone() const {
  return std::make_unique<CartPoleEnv>(*this);
}

}  // namespace vpk
