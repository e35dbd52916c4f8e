#include "tgp/learn.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tgp/errors.hpp"
#include "tgp/rng.hpp"

namespace tgp {

namespace {

void require_data(const SuffStats& stats) {
  if (stats.n() == 0) throw ConfigError("fit: accumulator is empty (N = 0)");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string("fit: ") + name + " must be positive");
}

Eigen::VectorXd fd_rhs(const SuffStats& stats) {
  const RffBasis& basis = stats.basis();
  return basis.gamma() * stats.psi_prime(0) +
         basis.row_sq_norms().cwiseProduct(stats.psi(0));
}

ModelMeta make_meta(const char* algorithm, const SuffStats& stats,
                    double lambda, double eta = 0.0) {
  ModelMeta meta;
  meta.algorithm = algorithm;
  meta.lambda = lambda;
  meta.eta = eta;
  meta.sigma_grid = stats.grid().levels();
  meta.n_data = stats.n();
  return meta;
}

}  // namespace

NoiseKernels NoiseKernels::compute(const RffBasis& basis, const NoiseGrid& grid) {
  NoiseKernels kernels;
  const Eigen::VectorXd& n2 = basis.row_sq_norms();
  const Eigen::MatrixXd& gram = basis.gram();
  Eigen::MatrixXd sum_n2 = n2.replicate(1, n2.size());
  sum_n2 += sum_n2.transpose().eval();  // ||z_s||^2 + ||z_s'||^2
  for (double sigma : grid.levels()) {
    const double gs = basis.gamma_sigma(sigma);
    const double a = 0.5 * (sigma / gs) * (sigma / gs);
    NoiseKernels::Level level;
    level.sigma = sigma;
    level.delta = (-a * n2.array()).exp();
    level.delta_plus = (-a * (sum_n2 + 2.0 * gram).array()).exp();
    level.delta_minus = (-a * (sum_n2 - 2.0 * gram).array()).exp();
    kernels.levels.push_back(std::move(level));
  }
  return kernels;
}

TgpModel fit_fd(const SuffStats& stats, double lambda,
                const SolverOptions& solver) {
  require_data(stats);
  require_positive(lambda, "lambda");
  const RffBasis& basis = stats.basis();
  const double g2 = basis.gamma() * basis.gamma();

  SpdSystem system;
  system.a = basis.gram().cwiseProduct(stats.phi_prime_outer(0));
  system.a.diagonal().array() += lambda * g2;
  system.b = fd_rhs(stats);
  Eigen::VectorXd theta = solve_spd(system, solver);
  return TgpModel(basis, stats.base(), std::move(theta),
                  make_meta("fd", stats, lambda));
}

TgpModel fit_ncfd(const SuffStats& stats, const NoiseKernels& kernels,
                  double lambda, const SolverOptions& solver) {
  require_data(stats);
  require_positive(lambda, "lambda");
  const RffBasis& basis = stats.basis();
  const NoiseGrid& grid = stats.grid();
  const int s = basis.feature_count();
  if (static_cast<int>(kernels.levels.size()) != grid.size())
    throw ConfigError("fit_ncfd: kernels do not match the noise grid");
  for (int l = 0; l < grid.size(); ++l)
    if (kernels.levels[l].sigma != grid.levels()[l])
      throw ConfigError("fit_ncfd: kernel sigma levels do not match the grid");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s, s);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s);
  for (int l = 0; l < grid.size(); ++l) {
    const double sigma = grid.levels()[l];
    const double gs = basis.gamma_sigma(sigma);
    const double inv_gs2 = 1.0 / (gs * gs);
    const NoiseKernels::Level& k = kernels.levels[l];

    a.noalias() += (0.5 * inv_gs2) *
                   (k.delta_minus + k.delta_plus).cwiseProduct(stats.phi_prime_outer(l));
    if (sigma > 0.0) {
      a.noalias() += (0.5 * inv_gs2) *
                     (k.delta_minus - k.delta_plus).cwiseProduct(stats.phi_outer(l));
    }
    // weight(s) = z_s^T (I - sigma^2 Sigma_sigma^{-1}) z_s
    const auto smoothed = stats.base().smoothed(sigma);
    Eigen::MatrixXd shrink = Eigen::MatrixXd::Identity(basis.dim(), basis.dim()) -
                             sigma * sigma * smoothed.inverse;
    if (sigma > 0.0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shrink,
                                                        Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-10)
        throw NumericalError("fit_ncfd: I - sigma^2 Sigma_sigma^{-1} is not PSD");
    }
    Eigen::VectorXd weight =
        (basis.frequencies() * shrink).cwiseProduct(basis.frequencies())
            .rowwise()
            .sum();
    b.noalias() += (1.0 / gs) * k.delta.cwiseProduct(stats.psi_prime(l));
    b.noalias() += inv_gs2 * weight.cwiseProduct(k.delta)
                                 .cwiseProduct(stats.psi(l));
  }

  SpdSystem system;
  system.a = basis.gram().cwiseProduct(a);
  system.a.diagonal().array() += lambda * grid.h_count();
  system.b = std::move(b);
  Eigen::VectorXd theta = solve_spd(system, solver);
  return TgpModel(basis, stats.base(), std::move(theta),
                  make_meta("ncfd", stats, lambda));
}

NoiseExpectations noise_expectations(const RffBasis& basis,
                                     const BaseMeasure& base,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     double sigma) {
  if (x.size() != basis.dim())
    throw ConfigError("noise_expectations: point dimension mismatch");
  if (sigma < 0.0) throw ConfigError("noise_expectations: sigma must be >= 0");
  const double gs = basis.gamma_sigma(sigma);
  const double a = 0.5 * (sigma / gs) * (sigma / gs);

  const Eigen::VectorXd phi = basis.phi(x, sigma);
  const Eigen::VectorXd phip = basis.phi_prime(x, sigma);
  const Eigen::VectorXd& n2 = basis.row_sq_norms();
  const Eigen::MatrixXd& gram = basis.gram();
  Eigen::MatrixXd sum_n2 = n2.replicate(1, n2.size());
  sum_n2 += sum_n2.transpose().eval();
  Eigen::VectorXd delta = (-a * n2.array()).exp();
  Eigen::MatrixXd delta_plus = (-a * (sum_n2 + 2.0 * gram).array()).exp();
  Eigen::MatrixXd delta_minus = (-a * (sum_n2 - 2.0 * gram).array()).exp();

  NoiseExpectations e;
  e.e_phi = delta.cwiseProduct(phi);
  e.e_phi_prime = delta.cwiseProduct(phip);
  e.e_outer = 0.5 * (delta_minus - delta_plus).cwiseProduct(phi * phi.transpose()) +
              0.5 * (delta_minus + delta_plus).cwiseProduct(phip * phip.transpose());
  const auto smoothed = base.smoothed(sigma);
  Eigen::VectorXd quad =
      (basis.frequencies() * smoothed.inverse)
          .cwiseProduct(basis.frequencies())
          .rowwise()
          .sum();  // z_s^T Sigma_sigma^{-1} z_s
  e.e_cross = -(sigma * sigma / gs) * delta.cwiseProduct(quad).cwiseProduct(phi);
  return e;
}

MgfMoments mgf_moments(const RffBasis& basis, const BaseMeasure& base) {
  if (basis.dim() != base.dim())
    throw ConfigError("mgf_moments: basis and base measure dimension mismatch");
  const double inv_2g2 = 0.5 / (basis.gamma() * basis.gamma());
  const Eigen::MatrixXd& z = basis.frequencies();
  Eigen::MatrixXd w = z * base.sigma() * z.transpose();  // z_s^T Sigma z_s'
  Eigen::VectorXd wd = w.diagonal();
  Eigen::MatrixXd sum_wd = wd.replicate(1, wd.size());
  sum_wd += sum_wd.transpose().eval();

  const Eigen::VectorXd phi_mu = basis.phi(base.mu());
  const Eigen::VectorXd phip_mu = basis.phi_prime(base.mu());

  MgfMoments m;
  m.mu_phi = (-inv_2g2 * wd.array()).exp() * phi_mu.array();
  Eigen::MatrixXd delta_plus = (-inv_2g2 * (sum_wd + 2.0 * w).array()).exp();
  Eigen::MatrixXd delta_minus = (-inv_2g2 * (sum_wd - 2.0 * w).array()).exp();
  m.sigma_phi =
      0.5 * (delta_minus + delta_plus).cwiseProduct(phi_mu * phi_mu.transpose()) +
      0.5 * (delta_minus - delta_plus).cwiseProduct(phip_mu * phip_mu.transpose()) -
      m.mu_phi * m.mu_phi.transpose();
  m.sigma_phi = 0.5 * (m.sigma_phi + m.sigma_phi.transpose()).eval();
  return m;
}

FvpdPosterior fvpd_posterior(const SuffStats& stats, double lambda, double eta,
                             const SolverOptions& solver) {
  require_data(stats);
  require_positive(lambda, "lambda");
  require_positive(eta, "eta");
  const RffBasis& basis = stats.basis();
  const double g2 = basis.gamma() * basis.gamma();

  FvpdPosterior post;
  Eigen::MatrixXd gram_phi = basis.gram().cwiseProduct(stats.phi_prime_outer(0));

  SpdSystem mean_system;
  mean_system.a = gram_phi;
  mean_system.a.diagonal().array() += lambda * g2 * eta;
  mean_system.b = fd_rhs(stats);
  post.mu_hat = solve_spd(mean_system, solver);

  post.sigma_hat_inv = gram_phi / (g2 * eta);
  post.sigma_hat_inv.diagonal().array() += lambda;

  const MgfMoments moments = mgf_moments(basis, stats.base());
  post.mu_phi = moments.mu_phi;
  post.sigma_phi = moments.sigma_phi;
  post.m = post.mu_phi - post.sigma_hat_inv * post.mu_hat;
  post.m_mat = post.sigma_phi + post.sigma_hat_inv;
  post.m_mat = 0.5 * (post.m_mat + post.m_mat.transpose()).eval();
  return post;
}

TgpModel fit_fvpd(const SuffStats& stats, double lambda, double eta,
                  const SolverOptions& solver) {
  FvpdPosterior post = fvpd_posterior(stats, lambda, eta, solver);
  const int s = stats.basis().feature_count();
  Eigen::LLT<Eigen::MatrixXd> llt(post.m_mat);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "fit_fvpd: predictive matrix M is not positive definite; "
        "a larger eta typically restores definiteness");
  FvpdForm form;
  form.m_inverse = llt.solve(Eigen::MatrixXd::Identity(s, s));
  form.m_inverse = 0.5 * (form.m_inverse + form.m_inverse.transpose()).eval();
  form.m = std::move(post.m);
  return TgpModel(stats.basis(), stats.base(), std::move(form),
                  make_meta("fvpd", stats, lambda, eta));
}

MapFitResult fit_map(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                     const RffBasis& basis, const BaseMeasure& base,
                     const MapOptions& options) {
  if (rows.rows() == 0) throw ConfigError("fit_map: empty data");
  if (rows.cols() != basis.dim())
    throw ConfigError("fit_map: data dimension does not match basis");
  if (!(options.step >= 0.0)) throw ConfigError("fit_map: step must be >= 0");
  require_positive(options.lambda, "lambda");
  if (options.iterations < 1) throw ConfigError("fit_map: T must be >= 1");
  if (options.mc_samples < 1) throw ConfigError("fit_map: S2 must be >= 1");

  const int s = basis.feature_count();
  const Eigen::Index n = rows.rows();
  const Eigen::Index s2 = options.mc_samples;

  // psi1 = sum_i phi(x_i), chunked.
  Eigen::VectorXd psi1 = Eigen::VectorXd::Zero(s);
  constexpr Eigen::Index kChunk = 8192;
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, n - start);
    psi1.noalias() +=
        basis.phi_block(rows.middleRows(start, len)).colwise().sum().transpose();
  }

  // zeta_j ~ N(mu, Sigma), drawn once and reused at every iteration.
  Rng rng(options.seed);
  const auto smoothed = base.smoothed(0.0);
  // Features at the MC points are cached in single precision: the cache is the
  // memory/bandwidth bottleneck, and its error is far below the stochastic
  // optimization scale.
  Eigen::MatrixXf phi_zeta(s2, s);
  for (Eigen::Index start = 0; start < s2; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, s2 - start);
    Eigen::MatrixXd zeta =
        rng.normal_matrix(len, basis.dim()) * smoothed.chol_lower.transpose();
    zeta.rowwise() += base.mu().transpose();
    phi_zeta.middleRows(start, len) = basis.phi_block(zeta).cast<float>();
  }

  const double nd = static_cast<double>(n);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(s);
  auto weighted_psi2 = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXf logits = phi_zeta * th.cast<float>();
    const float mx = logits.maxCoeff();
    Eigen::VectorXf w = (logits.array() - mx).exp();
    w /= w.sum();
    return (phi_zeta.transpose() * w).cast<double>().eval();
  };

  for (int t = 0; t < options.iterations; ++t) {
    Eigen::VectorXd psi2 = weighted_psi2(theta);
    theta = (1.0 - options.step * options.lambda) * theta +
            options.step * (psi1 - nd * psi2);
    if (!theta.allFinite())
      throw NumericalError("fit_map: divergence, reduce the step size");
  }

  MapFitResult result{
      TgpModel(basis, base, theta,
               [&] {
                 ModelMeta meta;
                 meta.algorithm = "map";
                 meta.lambda = options.lambda;
                 meta.sigma_grid = {0.0};
                 meta.n_data = n;
                 return meta;
               }()),
      0.0, psi1.norm()};
  result.final_update_norm =
      (psi1 - nd * weighted_psi2(theta) - options.lambda * theta).norm();
  return result;
}

Eigen::VectorXd update_base_mu(const Eigen::VectorXd& data_mean,
                               const Eigen::VectorXd& phi_prime_mean,
                               const Eigen::VectorXd& theta,
                               const Eigen::MatrixXd& sigma,
                               const RffBasis& basis) {
  if (phi_prime_mean.size() != basis.feature_count() ||
      theta.size() != basis.feature_count())
    throw ConfigError("update_base_mu: feature dimension mismatch");
  if (data_mean.size() != basis.dim() || sigma.rows() != basis.dim())
    throw ConfigError("update_base_mu: data dimension mismatch");
  return data_mean - sigma * basis.frequencies().transpose() *
                         theta.cwiseProduct(phi_prime_mean) / basis.gamma();
}

Eigen::MatrixXd update_base_sigma(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const Eigen::VectorXd& mu,
                                  const Eigen::VectorXd& theta,
                                  const RffBasis& basis) {
  const Eigen::Index n = rows.rows();
  const int d = basis.dim();
  if (n == 0) throw ConfigError("update_base_sigma: empty data");
  if (rows.cols() != d || mu.size() != d)
    throw ConfigError("update_base_sigma: dimension mismatch");

  Eigen::MatrixXd centered = rows;
  centered.rowwise() -= mu.transpose();
  Eigen::MatrixXd sigma_bar =
      centered.transpose() * centered / static_cast<double>(n);

  Eigen::MatrixXd phip = basis.phi_prime_block(rows);  // N x S
  // Upsilon = (1/N) sum_i (theta .* phi'(x_i)) (x_i - mu)^T, S x d
  Eigen::MatrixXd upsilon = theta.asDiagonal() * phip.transpose() * centered /
                            static_cast<double>(n);
  Eigen::MatrixXd zt_upsilon = basis.frequencies().transpose() * upsilon;  // d x d
  Eigen::MatrixXd q = (zt_upsilon + zt_upsilon.transpose()) / basis.gamma();
  q.diagonal().array() += 2.0;
  return solve_lyapunov(sigma_bar, q);
}

TgpModel fit_fd_with_base_updates(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const RffBasis& basis, BaseMeasure base,
                                  double lambda, int iterations,
                                  const SolverOptions& solver) {
  if (iterations < 1) throw ConfigError("fit: iterations must be >= 1");
  Eigen::VectorXd data_mean = rows.colwise().mean().transpose();
  Eigen::VectorXd phi_prime_mean =
      basis.phi_prime_block(rows).colwise().mean().transpose();

  Eigen::VectorXd theta;
  for (int it = 0; it < iterations; ++it) {
    SuffStats stats(basis, base, NoiseGrid::zero_only());
    stats.accumulate(rows);
    theta = fit_fd(stats, lambda, solver).theta();
    Eigen::VectorXd mu =
        update_base_mu(data_mean, phi_prime_mean, theta, base.sigma(), basis);
    Eigen::MatrixXd sigma = update_base_sigma(rows, mu, theta, basis);
    base = BaseMeasure(std::move(mu), std::move(sigma));
  }
  SuffStats stats(basis, base, NoiseGrid::zero_only());
  stats.accumulate(rows);
  return fit_fd(stats, lambda, solver);
}

}  // namespace tgp
