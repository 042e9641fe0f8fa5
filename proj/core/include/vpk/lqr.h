#pragma once

#include <Eigen/Core>

namespace vpk {

enum class LqrMode { kContinuous, kDiscrete };

/// Infinite-horizon LQR with cost s'Qs + a'Ra; the control law is a = -K s.
struct LqrSolution {
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Qc;
  Eigen::MatrixXd Rc;
  LqrMode mode = LqrMode::kDiscrete;
  int iterations = 0;
};

/// Discrete mode iterates the Riccati recursion to a fixed point. Continuous
/// mode starts from the discrete solution of a fine Euler discretization and
/// refines it with Newton-Kleinman steps. Both stop when successive P differ
/// by at most 1e-10 (relative to max(1, |P|)) and throw std::runtime_error
/// after 1e5 iterations.
LqrSolution LqrSolve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& Rc,
                     LqrMode mode);

/// Max-norm of the algebraic Riccati residual of P.
double RiccatiResidual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                       const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& Rc,
                       const Eigen::MatrixXd& P, LqrMode mode);

/// Solves A'X + XA + Q = 0 for symmetric X through the n(n+1)/2 linear system.
/// Throws std::runtime_error when the system is singular.
Eigen::MatrixXd SolveContinuousLyapunov(const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& Q);

/// True when every eigenvalue has negative real part.
bool IsHurwitz(const Eigen::MatrixXd& A);
/// Largest eigenvalue modulus.
double SpectralRadius(const Eigen::MatrixXd& A);

}  // namespace vpk
