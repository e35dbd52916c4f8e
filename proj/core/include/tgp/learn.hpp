#ifndef TGP_LEARN_HPP
#define TGP_LEARN_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "tgp/model.hpp"
#include "tgp/solvers.hpp"
#include "tgp/suffstats.hpp"

namespace tgp {

/// Noise-smoothing kernels of the analytic expectations:
///   delta_sigma(s)      = exp(-1/2 (sigma/gamma_sigma)^2 ||z_s||^2)
///   Delta+/-_sigma(s,s') = exp(-1/2 (sigma/gamma_sigma)^2 ||z_s +/- z_s'||^2)
/// All entries are 1 at sigma = 0.
struct NoiseKernels {
  struct Level {
    double sigma = 0.0;
    Eigen::VectorXd delta;        // S
    Eigen::MatrixXd delta_plus;   // S x S
    Eigen::MatrixXd delta_minus;  // S x S
  };
  std::vector<Level> levels;

  static NoiseKernels compute(const RffBasis& basis, const NoiseGrid& grid);
};

/// Basic Fisher divergence fit:
///   theta = (lambda gamma^2 I + ZZ^T .* Phi')^{-1} (gamma psi' + ||Z||^2 .* psi)
TgpModel fit_fd(const SuffStats& stats, double lambda,
                const SolverOptions& solver = {});

/// Noise conditional Fisher divergence fit over the grid of stats:
///   theta = (lambda H I + ZZ^T .* A)^{-1} b
/// with A, b assembled from the per-level statistics and noise kernels.
TgpModel fit_ncfd(const SuffStats& stats, const NoiseKernels& kernels,
                  double lambda, const SolverOptions& solver = {});

/// Closed-form expectations over y = x + xi, xi ~ N(0, sigma^2 I).
struct NoiseExpectations {
  Eigen::VectorXd e_phi;        // E[phi_sigma(y)]
  Eigen::VectorXd e_phi_prime;  // E[phi'_sigma(y)]
  Eigen::MatrixXd e_outer;      // E[phi'_sigma(y) phi'_sigma(y)^T]
  Eigen::VectorXd e_cross;      // E[(Z Sigma_sigma^{-1} xi) .* phi'_sigma(y)]
};
NoiseExpectations noise_expectations(const RffBasis& basis,
                                     const BaseMeasure& base,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     double sigma);

/// Exact first two moments of phi(x) under x ~ N(mu, Sigma).
struct MgfMoments {
  Eigen::VectorXd mu_phi;     // S
  Eigen::MatrixXd sigma_phi;  // S x S, symmetric
};
MgfMoments mgf_moments(const RffBasis& basis, const BaseMeasure& base);

/// Gaussian posterior over theta and derived predictive parameters.
struct FvpdPosterior {
  Eigen::VectorXd mu_hat;
  Eigen::MatrixXd sigma_hat_inv;  // lambda I + (1 / gamma^2 eta) ZZ^T .* Phi'
  Eigen::VectorXd mu_phi;
  Eigen::MatrixXd sigma_phi;
  Eigen::VectorXd m;  // mu_phi - sigma_hat_inv * mu_hat
  Eigen::MatrixXd m_mat;  // sigma_phi + sigma_hat_inv
};
FvpdPosterior fvpd_posterior(const SuffStats& stats, double lambda, double eta,
                             const SolverOptions& solver = {});

/// Variational predictive fit (FVPD-form model with M^{-1}, m).
TgpModel fit_fvpd(const SuffStats& stats, double lambda, double eta,
                  const SolverOptions& solver = {});

/// Stochastic MAP baseline.
struct MapOptions {
  double lambda = 0.1;
  double step = 0.05;        // rho
  int iterations = 10000;    // T
  int mc_samples = 100000;   // S2, drawn once and reused
  std::uint64_t seed = 0;
};
struct MapFitResult {
  TgpModel model;
  double final_update_norm = 0.0;  // ||psi1 - N psi2 - lambda theta|| at exit
  double psi1_norm = 0.0;
};
MapFitResult fit_map(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                     const RffBasis& basis, const BaseMeasure& base,
                     const MapOptions& options);

/// Closed-form coordinate updates of the base measure given theta.
Eigen::VectorXd update_base_mu(const Eigen::VectorXd& data_mean,
                               const Eigen::VectorXd& phi_prime_mean,
                               const Eigen::VectorXd& theta,
                               const Eigen::MatrixXd& sigma,
                               const RffBasis& basis);
Eigen::MatrixXd update_base_sigma(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const Eigen::VectorXd& mu,
                                  const Eigen::VectorXd& theta,
                                  const RffBasis& basis);

/// Optional alternating loop: fit theta, then refresh (mu, Sigma).
TgpModel fit_fd_with_base_updates(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const RffBasis& basis, BaseMeasure base,
                                  double lambda, int iterations = 5,
                                  const SolverOptions& solver = {});

}  // namespace tgp

#endif
