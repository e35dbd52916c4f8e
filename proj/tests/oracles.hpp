// Self-contained reference implementations used to cross-check the library.
// Everything here is written as plain scalar loops against the defining
// formulas, independent of the optimized code paths under test.
#ifndef TGP_TESTS_ORACLES_HPP
#define TGP_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

namespace oracle {

inline double feature(const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                      double gamma_sigma, const Eigen::VectorXd& x, int s) {
  const int S = static_cast<int>(z.rows());
  double arg = c(s);
  for (int k = 0; k < x.size(); ++k) arg += z(s, k) * x(k) / gamma_sigma;
  return std::sqrt(2.0 / S) * std::cos(arg);
}

inline double feature_prime(const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                            double gamma_sigma, const Eigen::VectorXd& x,
                            int s) {
  const int S = static_cast<int>(z.rows());
  double arg = c(s);
  for (int k = 0; k < x.size(); ++k) arg += z(s, k) * x(k) / gamma_sigma;
  return -std::sqrt(2.0 / S) * std::sin(arg);
}

inline Eigen::VectorXd phi(const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                           double gamma_sigma, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(z.rows());
  for (int s = 0; s < z.rows(); ++s) out(s) = feature(z, c, gamma_sigma, x, s);
  return out;
}

inline Eigen::VectorXd phi_prime(const Eigen::MatrixXd& z,
                                 const Eigen::VectorXd& c, double gamma_sigma,
                                 const Eigen::VectorXd& x) {
  Eigen::VectorXd out(z.rows());
  for (int s = 0; s < z.rows(); ++s)
    out(s) = feature_prime(z, c, gamma_sigma, x, s);
  return out;
}

/// Score of the tilted density, written from its definition.
inline Eigen::VectorXd score(const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                             double gamma_sigma, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& sigma_inv,
                             const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& x) {
  Eigen::VectorXd grad = -sigma_inv * (x - mu);
  for (int s = 0; s < z.rows(); ++s)
    grad += theta(s) * feature_prime(z, c, gamma_sigma, x, s) *
            z.row(s).transpose() / gamma_sigma;
  return grad;
}

inline double hessian_trace(const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                            double gamma_sigma, const Eigen::MatrixXd& sigma_inv,
                            const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& x) {
  double tr = -sigma_inv.trace();
  for (int s = 0; s < z.rows(); ++s)
    tr += -theta(s) * feature(z, c, gamma_sigma, x, s) *
          z.row(s).squaredNorm() / (gamma_sigma * gamma_sigma);
  return tr;
}

/// Score-matching objective over a dataset:
///   sum_i 1/2 ||grad ln q(x_i)||^2 + tr(hess ln q(x_i)),
/// plus the ridge (lambda/2)||theta||^2.
inline double fd_objective(const Eigen::MatrixXd& rows,
                           const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                           double gamma, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& sigma_inv, double lambda,
                           const Eigen::VectorXd& theta) {
  double value = 0.5 * lambda * theta.squaredNorm();
  for (int i = 0; i < rows.rows(); ++i) {
    const Eigen::VectorXd x = rows.row(i).transpose();
    value += 0.5 * score(z, c, gamma, mu, sigma_inv, theta, x).squaredNorm();
    value += hessian_trace(z, c, gamma, sigma_inv, theta, x);
  }
  return value;
}

/// Analytic expectations over y = x + xi, xi ~ N(0, sigma^2 I), written
/// directly from their closed forms (independent of the library versions).
struct SmoothedExpectations {
  Eigen::VectorXd e_phi;
  Eigen::VectorXd e_phi_prime;
  Eigen::MatrixXd e_outer;
  Eigen::VectorXd e_cross;
};

inline SmoothedExpectations smoothed_expectations(
    const Eigen::MatrixXd& z, const Eigen::VectorXd& c, double gamma,
    const Eigen::MatrixXd& sigma_base, const Eigen::VectorXd& x, double sigma) {
  const int S = static_cast<int>(z.rows());
  const int d = static_cast<int>(z.cols());
  const double gs = std::sqrt(gamma * gamma + sigma * sigma);
  const Eigen::MatrixXd sigma_s =
      sigma_base + sigma * sigma * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd sigma_s_inv = sigma_s.inverse();

  SmoothedExpectations e;
  e.e_phi.resize(S);
  e.e_phi_prime.resize(S);
  e.e_outer.resize(S, S);
  e.e_cross.resize(S);
  const double r2 = (sigma / gs) * (sigma / gs);
  for (int s = 0; s < S; ++s) {
    const double delta = std::exp(-0.5 * r2 * z.row(s).squaredNorm());
    e.e_phi(s) = delta * feature(z, c, gs, x, s);
    e.e_phi_prime(s) = delta * feature_prime(z, c, gs, x, s);
    const Eigen::VectorXd w = sigma_s_inv * z.row(s).transpose();
    e.e_cross(s) = -(sigma * sigma / gs) * delta *
                   z.row(s).dot(w) * feature(z, c, gs, x, s);
  }
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < S; ++t) {
      const double dm =
          std::exp(-0.5 * r2 *
                   (z.row(s) - z.row(t)).squaredNorm());
      const double dp =
          std::exp(-0.5 * r2 *
                   (z.row(s) + z.row(t)).squaredNorm());
      e.e_outer(s, t) =
          0.5 * (dm - dp) * feature(z, c, gs, x, s) * feature(z, c, gs, x, t) +
          0.5 * (dm + dp) * feature_prime(z, c, gs, x, s) *
              feature_prime(z, c, gs, x, t);
    }
  }
  return e;
}

/// Expected score-matching objective under the noise grid, assembled from the
/// analytic expectations above: (1/H) sum_h L_sigma_h(theta) plus the ridge.
/// theta-independent constants are dropped.
inline double ncfd_objective(const Eigen::MatrixXd& rows,
                             const Eigen::MatrixXd& z, const Eigen::VectorXd& c,
                             double gamma, const Eigen::VectorXd& mu,
                             const Eigen::MatrixXd& sigma_base,
                             const std::vector<double>& sigma_grid,
                             double lambda, const Eigen::VectorXd& theta) {
  const int S = static_cast<int>(z.rows());
  const int d = static_cast<int>(z.cols());
  double value = 0.5 * lambda * theta.squaredNorm();
  for (double sigma : sigma_grid) {
    const double gs = std::sqrt(gamma * gamma + sigma * sigma);
    const Eigen::MatrixXd sigma_s =
        sigma_base + sigma * sigma * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd sigma_s_inv = sigma_s.inverse();
    double level = 0.0;
    for (int i = 0; i < rows.rows(); ++i) {
      const Eigen::VectorXd x = rows.row(i).transpose();
      const SmoothedExpectations e =
          smoothed_expectations(z, c, gamma, sigma_base, x, sigma);
      // 1/2 E||(1/gs) Z^T (theta .* phi'(y))||^2
      double quad = 0.0;
      for (int s = 0; s < S; ++s)
        for (int t = 0; t < S; ++t)
          quad += theta(s) * theta(t) * z.row(s).dot(z.row(t)) * e.e_outer(s, t);
      level += 0.5 * quad / (gs * gs);
      // -(1/gs) theta^T E[phi'(y) .* Z Sigma_s^{-1} (y - mu)]
      const Eigen::VectorXd zsx = z * (sigma_s_inv * (x - mu));
      for (int s = 0; s < S; ++s)
        level += -theta(s) * (e.e_phi_prime(s) * zsx(s) + e.e_cross(s)) / gs;
      // E[tr hess of the tilt] = -(1/gs^2) sum_s theta_s E[phi_s(y)] ||z_s||^2
      for (int s = 0; s < S; ++s)
        level += -theta(s) * e.e_phi(s) * z.row(s).squaredNorm() / (gs * gs);
    }
    value += level / static_cast<double>(sigma_grid.size());
  }
  return value;
}

/// Exact minimizer of a quadratic function f(theta) = 1/2 theta^T A theta +
/// b^T theta + const, recovered from objective evaluations at 0, e_j and
/// e_j + e_k. Exact for quadratics, no step-size error.
inline Eigen::VectorXd quadratic_minimizer(
    int dim, const std::function<double(const Eigen::VectorXd&)>& f) {
  const double f0 = f(Eigen::VectorXd::Zero(dim));
  Eigen::VectorXd fe(dim);
  for (int j = 0; j < dim; ++j)
    fe(j) = f(Eigen::VectorXd::Unit(dim, j));
  Eigen::MatrixXd a(dim, dim);
  Eigen::VectorXd b(dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
      theta(j) = 1.0;
      theta(k) = 1.0;
      a(j, k) = a(k, j) = f(theta) - fe(j) - fe(k) + f0;
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
    theta(j) = 2.0;
    a(j, j) = f(theta) - 2.0 * fe(j) + f0;
  }
  for (int j = 0; j < dim; ++j) b(j) = fe(j) - f0 - 0.5 * a(j, j);
  return -a.fullPivLu().solve(b);
}

/// Deterministic standard normal draws for reference Monte-Carlo estimates;
/// xorshift-based, unrelated to the library generator.
class Normals {
 public:
  explicit Normals(std::uint64_t seed) : state_(seed * 2685821657736338717ULL + 1) {}

  double uniform() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return (state_ >> 11) * 0x1.0p-53;
  }

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform(), v = uniform();
    while (u <= 0.0) u = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out(i) = (*this)();
    return out;
  }

  Eigen::MatrixXd matrix(int rows, int cols) {
    Eigen::MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out(i, j) = (*this)();
    return out;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Rows from N(mu, Sigma) via an explicit Cholesky factor.
inline Eigen::MatrixXd gaussian_rows(Normals& rng, int n,
                                     const Eigen::VectorXd& mu,
                                     const Eigen::MatrixXd& sigma) {
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  Eigen::MatrixXd rows = rng.matrix(n, static_cast<int>(mu.size())) * l.transpose();
  rows.rowwise() += mu.transpose();
  return rows;
}

}  // namespace oracle

#endif
