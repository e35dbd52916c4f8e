#include "tgp/solvers.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "tgp/errors.hpp"

namespace tgp {

namespace {

Eigen::VectorXd cg_jacobi(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double tol, int max_iter) {
  const Eigen::Index n = b.size();
  Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
  if (!inv_diag.allFinite())
    throw NumericalError("cg: zero diagonal entry, Jacobi preconditioner undefined");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  const double b_norm = b.norm();
  if (b_norm == 0.0) return x;

  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  Eigen::VectorXd ap(n);
  for (int it = 0; it < max_iter; ++it) {
    ap.noalias() = a * p;
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= tol * b_norm) return x;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw NumericalError("cg: no convergence within iteration cap");
}

}  // namespace

Eigen::VectorXd solve_spd(const SpdSystem& system, const SolverOptions& options) {
  const Eigen::Index s = system.a.rows();
  if (system.a.cols() != s || system.b.size() != s)
    throw ConfigError("solve_spd: shape mismatch");
  const double asym = (system.a - system.a.transpose()).norm();
  if (asym > 1e-10 * std::max(1.0, system.a.norm()))
    throw ConfigError("solve_spd: matrix is not symmetric");

  Eigen::MatrixXd a = system.a;
  if (system.ridge != 0.0) a.diagonal().array() += system.ridge;

  SolveMethod method = options.method;
  if (method == SolveMethod::Auto)
    method = s <= 2048 ? SolveMethod::Direct : SolveMethod::ConjugateGradient;
  const int max_iter =
      options.max_iter > 0 ? options.max_iter : 10 * static_cast<int>(s);

  Eigen::VectorXd x;
  if (method == SolveMethod::Direct) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
      throw NumericalError("solve_spd: Cholesky factorization failed (not PD)");
    x = llt.solve(system.b);
    // One step of iterative refinement keeps the residual contract tight.
    x += llt.solve(system.b - a * x);
  } else {
    x = cg_jacobi(a, system.b, options.tol, max_iter);
  }

  const double b_norm = system.b.norm();
  if (b_norm > 0.0) {
    const double rel_res = (a * x - system.b).norm() / b_norm;
    // Small slack over the CG recursion residual vs the true residual.
    const double bound = method == SolveMethod::Direct
                             ? std::max(options.tol, 1e-10)
                             : options.tol * 1.05;
    if (!(rel_res <= bound))
      throw NumericalError("solve_spd: residual contract violated");
  }
  return x;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& sigma_bar,
                               const Eigen::MatrixXd& q) {
  const Eigen::Index d = sigma_bar.rows();
  if (sigma_bar.cols() != d || q.rows() != d || q.cols() != d)
    throw ConfigError("solve_lyapunov: shape mismatch");
  if (!sigma_bar.isApprox(sigma_bar.transpose(), 1e-10))
    throw ConfigError("solve_lyapunov: sigma_bar must be symmetric");
  if (!q.isApprox(q.transpose(), 1e-10))
    throw ConfigError("solve_lyapunov: Q must be symmetric");

  // vec(X) = (sigma_bar (x) I + I (x) sigma_bar)^{-1} vec(Q)
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd k(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      k.block(i * d, j * d, d, d) = sigma_bar(i, j) * id;
  for (Eigen::Index i = 0; i < d; ++i)
    k.block(i * d, i * d, d, d) += sigma_bar;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (!lu.isInvertible())
    throw NumericalError("solve_lyapunov: singular Kronecker system");
  Eigen::VectorXd vec_q = Eigen::Map<const Eigen::VectorXd>(q.data(), d * d);
  Eigen::VectorXd vec_x = lu.solve(vec_q);
  Eigen::MatrixXd x = Eigen::Map<Eigen::MatrixXd>(vec_x.data(), d, d);
  x = 0.5 * (x + x.transpose()).eval();

  const double q_norm = q.norm();
  const double residual = (sigma_bar * x + x * sigma_bar - q).norm();
  if (q_norm > 0.0 && !(residual <= 1e-10 * q_norm))
    throw NumericalError("solve_lyapunov: residual too large");

  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success)
    throw NumericalError("solve_lyapunov: recovered precision matrix is not PD");
  return llt.solve(id);
}

}  // namespace tgp
