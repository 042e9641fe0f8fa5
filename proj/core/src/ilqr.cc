#include "vpk/ilqr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace vpk {

namespace {

struct Trajectory {
  std::vector<StateVector> s;
  std::vector<double> u;
  double cost = 0.0;
};

double StageCost(const IlqrConfig& c, const StateVector& s, double u) {
  return s.dot(c.Qc * s) + c.Rc(0, 0) * u * u;
}

double TerminalCost(const Eigen::MatrixXd& P_T, const StateVector& s) {
  return s.dot(P_T * s);
}

std::string TraceString(const std::vector<double>& trace) {
  std::ostringstream out;
  out << "cost trace:";
  for (double c : trace) out << ' ' << c;
  return out.str();
}

}  // namespace

IlqrConfig DefaultIlqrConfig() {
  IlqrConfig c;
  c.Qc = Eigen::Vector4d(1.0, 1.0, 10.0, 1.0).asDiagonal();
  c.Rc = Eigen::MatrixXd::Constant(1, 1, 0.1);
  return c;
}

IlqrResult IlqrSolve(const ScalarControlModel& model, const StateVector& s0,
                     const Eigen::MatrixXd& K, const Eigen::MatrixXd& P_T,
                     const IlqrConfig& config) {
  const int T = config.horizon;
  const int n = static_cast<int>(s0.size());
  if (T < 1) throw std::invalid_argument("iLQR horizon must be >= 1");
  if (config.iterations < 0) throw std::invalid_argument("iLQR iterations must be >= 0");

  Trajectory nominal;
  nominal.s.push_back(s0);
  for (int t = 0; t < T; ++t) {
    const double u = -(K * nominal.s[t])(0);
    nominal.u.push_back(u);
    nominal.cost += StageCost(config, nominal.s[t], u);
    nominal.s.push_back(model(nominal.s[t], u));
  }
  nominal.cost += TerminalCost(P_T, nominal.s[T]);

  IlqrResult result;
  result.cost_trace.push_back(nominal.cost);
  if (!std::isfinite(nominal.cost)) {
    throw std::runtime_error("iLQR initial rollout diverged; " + TraceString(result.cost_trace));
  }

  const double h = config.fd_step;
  std::vector<Eigen::MatrixXd> A(T);
  std::vector<Eigen::VectorXd> B(T);
  std::vector<double> k_ff(T);
  std::vector<Eigen::RowVectorXd> k_fb(T);
  Eigen::MatrixXd V_xx_next;

  const int passes = std::max(config.iterations, 1);
  for (int iter = 0; iter < passes; ++iter) {
    for (int t = 0; t < T; ++t) {
      A[t].resize(n, n);
      for (int j = 0; j < n; ++j) {
        StateVector plus = nominal.s[t];
        StateVector minus = nominal.s[t];
        plus[j] += h;
        minus[j] -= h;
        A[t].col(j) = (model(plus, nominal.u[t]) - model(minus, nominal.u[t])) / (2 * h);
      }
      B[t] = (model(nominal.s[t], nominal.u[t] + h) - model(nominal.s[t], nominal.u[t] - h)) /
             (2 * h);
    }

    Eigen::VectorXd V_x = 2.0 * P_T * nominal.s[T];
    Eigen::MatrixXd V_xx = 2.0 * P_T;
    const double R = config.Rc(0, 0);
    for (int t = T - 1; t >= 0; --t) {
      if (t == 0) V_xx_next = V_xx;
      const Eigen::VectorXd Q_x = 2.0 * config.Qc * nominal.s[t] + A[t].transpose() * V_x;
      const double Q_u = 2.0 * R * nominal.u[t] + B[t].dot(V_x);
      const Eigen::MatrixXd Q_xx = 2.0 * config.Qc + A[t].transpose() * V_xx * A[t];
      double Q_uu = 2.0 * R + B[t].dot(V_xx * B[t]);
      const Eigen::RowVectorXd Q_ux = B[t].transpose() * V_xx * A[t];
      Q_uu = std::max(Q_uu, 2.0 * R);
      k_ff[t] = -Q_u / Q_uu;
      k_fb[t] = -Q_ux / Q_uu;
      V_x = Q_x + k_fb[t].transpose() * (Q_uu * k_ff[t] + Q_u) + Q_ux.transpose() * k_ff[t];
      V_xx = Q_xx + k_fb[t].transpose() * Q_uu * k_fb[t] + k_fb[t].transpose() * Q_ux +
             Q_ux.transpose() * k_fb[t];
      V_xx = 0.5 * (V_xx + V_xx.transpose());
    }

    if (iter >= config.iterations) break;

    bool any_finite = false;
    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1.0 / 1024 && !accepted; alpha /= 2) {
      Trajectory trial;
      trial.s.push_back(s0);
      for (int t = 0; t < T; ++t) {
        const double u = nominal.u[t] + alpha * k_ff[t] +
                         (k_fb[t] * (trial.s[t] - nominal.s[t]))(0);
        trial.u.push_back(u);
        trial.cost += StageCost(config, trial.s[t], u);
        trial.s.push_back(model(trial.s[t], u));
      }
      trial.cost += TerminalCost(P_T, trial.s[T]);
      if (!std::isfinite(trial.cost)) continue;
      any_finite = true;
      if (trial.cost <= nominal.cost) {
        nominal = std::move(trial);
        accepted = true;
      }
    }
    result.cost_trace.push_back(nominal.cost);
    if (!any_finite) {
      throw std::runtime_error("iLQR forward pass diverged at iteration " +
                               std::to_string(iter + 1) + "; " +
                               TraceString(result.cost_trace));
    }
  }

  // V_xx_next holds the Hessian at t = 1 from the last backward pass; for a
  // horizon of one step that is the terminal weight.
  result.P1 = T > 1 ? Eigen::MatrixXd(0.5 * V_xx_next) : P_T;
  result.states = std::move(nominal.s);
  result.controls = std::move(nominal.u);
  return result;
}

IlqrOracle::IlqrOracle(CartPoleParams params, IlqrConfig config)
    : params_(params), config_(std::move(config)) {
  params_.Validate();
  if (config_.Qc.size() == 0 || config_.Rc.size() == 0) {
    const IlqrConfig defaults = DefaultIlqrConfig();
    if (config_.Qc.size() == 0) config_.Qc = defaults.Qc;
    if (config_.Rc.size() == 0) config_.Rc = defaults.Rc;
  }
  const LinearModel lin = CartPoleLinearize(params_).discrete;
  lqr_ = LqrSolve(lin.A, lin.B, config_.Qc, config_.Rc, LqrMode::kDiscrete);
}

ActionSpace IlqrOracle::action_space() const {
  return params_.continuous_actions
             ? ActionSpace::Continuous(-params_.action_limit, params_.action_limit)
             : ActionSpace::Discrete(2);
}

double IlqrOracle::PlannedForce(const StateVector& s) const {
  if (s.cwiseAbs().maxCoeff() <= config_.fallback_radius) return -(lqr_.K * s)(0);
  const ScalarControlModel model = [this](const Eigen::Ref<const Eigen::VectorXd>& x,
                                          double u) { return CartPoleStep(params_, x, u); };
  return IlqrSolve(model, s, lqr_.K, lqr_.P, config_).controls.front();
}

Eigen::MatrixXd IlqrOracle::CostToGo(const StateVector& s) const {
  if (s.cwiseAbs().maxCoeff() <= config_.fallback_radius) return lqr_.P;
  const ScalarControlModel model = [this](const Eigen::Ref<const Eigen::VectorXd>& x,
                                          double u) { return CartPoleStep(params_, x, u); };
  return IlqrSolve(model, s, lqr_.K, lqr_.P, config_).P1;
}

Action IlqrOracle::Act(const StateVector& s) const {
  const double force = PlannedForce(s);
  if (params_.continuous_actions) {
    return Action::Continuous(std::clamp(force, -params_.action_limit, params_.action_limit));
  }
  return Action::Discrete(force > 0.0 ? 1 : 0);
}

double IlqrOracle::QValue(const StateVector& s, const Action& a) const {
  const StateVector next = CartPoleStep(params_, s, CartPoleForce(params_, a));
  return -next.dot(CostToGo(s) * next);
}

}  // namespace vpk
