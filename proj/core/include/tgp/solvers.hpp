#ifndef TGP_SOLVERS_HPP
#define TGP_SOLVERS_HPP

#include <Eigen/Core>

namespace tgp {

enum class SolveMethod { Auto, Direct, ConjugateGradient };

struct SolverOptions {
  SolveMethod method = SolveMethod::Auto;
  double tol = 1e-8;   // CG relative residual
  int max_iter = 0;    // 0 = 10 * S
};

/// Symmetric positive definite system (A + ridge I) x = b.
struct SpdSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double ridge = 0.0;
};

/// Direct Cholesky solve, or Jacobi-preconditioned conjugate gradients.
/// Auto picks direct for S <= 2048. The returned solution always satisfies
/// ||Ax - b|| / ||b|| <= tol (checked on exit); throws NumericalError on
/// factorization failure or CG non-convergence.
Eigen::VectorXd solve_spd(const SpdSystem& system,
                          const SolverOptions& options = {});

/// Solves sigma_bar * X + X * sigma_bar = Q for X via the Kronecker-product
/// linearization (O(d^6)), then returns Sigma = X^{-1}. Throws NumericalError
/// if the recovered X is not positive definite or the residual exceeds 1e-10.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& sigma_bar,
                               const Eigen::MatrixXd& q);

}  // namespace tgp

#endif
