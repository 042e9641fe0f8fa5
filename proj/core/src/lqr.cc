#include "vpk/lqr.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vpk {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kTolerance = 1e-10;

void CheckShapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                 const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& Rc) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Qc.rows() != n || Qc.cols() != n ||
      Rc.rows() != B.cols() || Rc.cols() != B.cols()) {
    throw std::invalid_argument("LQR matrix dimensions are inconsistent");
  }
  Eigen::LLT<Eigen::MatrixXd> r(Rc);
  if (r.info() != Eigen::Success) throw std::invalid_argument("LQR needs R positive definite");
}

bool Converged(const Eigen::MatrixXd& next, const Eigen::MatrixXd& prev) {
  const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
  return (next - prev).cwiseAbs().maxCoeff() <= kTolerance * scale;
}

// Returns P and the iteration count; throws when the recursion does not
// settle.
std::pair<Eigen::MatrixXd, int> IterateDare(const Eigen::MatrixXd& A,
                                            const Eigen::MatrixXd& B,
                                            const Eigen::MatrixXd& Q,
                                            const Eigen::MatrixXd& R,
                                            double tolerance) {
  Eigen::MatrixXd P = Q;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd gain = (R + BtP * B).ldlt().solve(BtP * A);
    Eigen::MatrixXd next = Q + A.transpose() * P * A - A.transpose() * P * B * gain;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) throw std::runtime_error("Riccati recursion diverged");
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    const bool done = (next - P).cwiseAbs().maxCoeff() <= tolerance * scale;
    P = std::move(next);
    if (done) return {P, it};
  }
  throw std::runtime_error("Riccati recursion did not converge in " +
                           std::to_string(kMaxIterations) + " iterations");
}

}  // namespace

LqrSolution LqrSolve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& Rc,
                     LqrMode mode) {
  CheckShapes(A, B, Qc, Rc);
  LqrSolution sol;
  sol.Qc = Qc;
  sol.Rc = Rc;
  sol.mode = mode;
  const auto n = A.rows();

  if (mode == LqrMode::kDiscrete) {
    auto [P, iterations] = IterateDare(A, B, Qc, Rc, kTolerance);
    sol.P = P;
    sol.iterations = iterations;
    const Eigen::MatrixXd BtP = B.transpose() * P;
    sol.K = (Rc + BtP * B).ldlt().solve(BtP * A);
    return sol;
  }

  // Warm start: an Euler discretization with a small step gives a gain that
  // stabilizes the continuous system.
  Eigen::MatrixXd K;
  bool stabilizing = false;
  for (double h = 1e-2; h >= 1e-5 && !stabilizing; h /= 10) {
    const Eigen::MatrixXd Ad = Eigen::MatrixXd::Identity(n, n) + h * A;
    const Eigen::MatrixXd Pd = IterateDare(Ad, h * B, h * Qc, h * Rc, 1e-8).first;
    const Eigen::MatrixXd BtP = (h * B).transpose() * Pd;
    K = (h * Rc + BtP * (h * B)).ldlt().solve(BtP * Ad);
    stabilizing = IsHurwitz(A - B * K);
  }
  if (!stabilizing) throw std::runtime_error("continuous LQR: no stabilizing warm start");

  const Eigen::MatrixXd Rinv_Bt = Rc.ldlt().solve(B.transpose());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Eigen::MatrixXd Acl = A - B * K;
    Eigen::MatrixXd next =
        SolveContinuousLyapunov(Acl, Qc + K.transpose() * Rc * K);
    K = Rinv_Bt * next;
    const bool done = it > 1 && Converged(next, P);
    P = std::move(next);
    if (done) {
      sol.P = P;
      sol.K = K;
      sol.iterations = it;
      return sol;
    }
  }
  throw std::runtime_error("Newton-Kleinman iteration did not converge");
}

double RiccatiResidual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                       const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& Rc,
                       const Eigen::MatrixXd& P, LqrMode mode) {
  Eigen::MatrixXd residual;
  if (mode == LqrMode::kContinuous) {
    residual = A.transpose() * P + P * A -
               P * B * Rc.ldlt().solve(B.transpose() * P) + Qc;
  } else {
    const Eigen::MatrixXd BtPA = B.transpose() * P * A;
    residual = A.transpose() * P * A - P -
               BtPA.transpose() * (Rc + B.transpose() * P * B).ldlt().solve(BtPA) + Qc;
  }
  return residual.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd SolveContinuousLyapunov(const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw std::invalid_argument("Lyapunov equation needs square matrices of equal size");
  }
  // Unknown X(i, j) with i <= j, stored row-major over the upper triangle.
  Eigen::MatrixXi index(n, n);
  int m = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      index(i, j) = index(j, i) = m++;
    }
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int row = index(i, j);
      // (A'X + XA)(i, j) = sum_k A(k, i) X(k, j) + X(i, k) A(k, j).
      for (int k = 0; k < n; ++k) {
        M(row, index(k, j)) += A(k, i);
        M(row, index(i, k)) += A(k, j);
      }
      rhs[row] = -0.5 * (Q(i, j) + Q(j, i));
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) throw std::runtime_error("Lyapunov equation is singular");
  const Eigen::VectorXd x = lu.solve(rhs);
  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) X(i, j) = x[index(i, j)];
  }
  return X;
}

bool IsHurwitz(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

double SpectralRadius(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace vpk
