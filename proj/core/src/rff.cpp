#include "tgp/rff.hpp"

#include <Eigen/Cholesky>

#include "tgp/errors.hpp"
#include "tgp/rng.hpp"

namespace tgp {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

FrequencyCovariance FrequencyCovariance::from_data_covariance(
    const Eigen::MatrixXd& sigma) {
  const double tr = sigma.trace();
  if (!(tr > 0.0)) throw ConfigError("frequency covariance: trace(Sigma) must be positive");
  const double d = static_cast<double>(sigma.rows());
  return {d * sigma / tr};
}

RffBasis RffBasis::sample(int d, int s_count, double gamma,
                          const FrequencyCovariance& cov, std::uint64_t seed) {
  if (d < 1) throw ConfigError("rff: dimension must be >= 1");
  if (s_count < 1) throw ConfigError("rff: feature count must be >= 1");
  if (!(gamma > 0.0)) throw ConfigError("rff: gamma must be positive");
  if (cov.sigma_z.rows() != d || cov.sigma_z.cols() != d)
    throw ConfigError("rff: frequency covariance has wrong dimension");
  if (!cov.sigma_z.isApprox(cov.sigma_z.transpose(), 1e-10))
    throw ConfigError("rff: frequency covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov.sigma_z);
  if (llt.info() != Eigen::Success)
    throw ConfigError("rff: frequency covariance must be positive definite");

  Rng rng(seed);
  RffBasis basis;
  // Standard normal rows mapped through the Cholesky factor: z ~ N(0, Sigma_z).
  basis.z_.noalias() = rng.normal_matrix(s_count, d) * llt.matrixL().transpose();
  basis.c_.resize(s_count);
  for (int s = 0; s < s_count; ++s) basis.c_(s) = rng.uniform(0.0, 2.0 * M_PI);
  basis.sigma_z_ = cov.sigma_z;
  basis.gamma_ = gamma;
  basis.seed_ = seed;
  basis.row_sq_norms_ = basis.z_.rowwise().squaredNorm();
  basis.gram_.noalias() = basis.z_ * basis.z_.transpose();
  std::uint64_t h = fnv1a(basis.z_.data(), sizeof(double) * basis.z_.size());
  basis.checksum_ = fnv1a(basis.c_.data(), sizeof(double) * basis.c_.size(), h);
  return basis;
}

RffBasis RffBasis::sample(int d, int s_count, double gamma, std::uint64_t seed) {
  return sample(d, s_count, gamma, FrequencyCovariance::identity(d), seed);
}

void RffBasis::eval_blocks(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                           double sigma, Eigen::MatrixXd* phi_out,
                           Eigen::MatrixXd* phi_prime_out) const {
  if (rows.cols() != dim())
    throw ConfigError("rff: data block dimension does not match basis");
  if (sigma < 0.0) throw ConfigError("rff: sigma must be >= 0");
  const double scale = std::sqrt(2.0 / feature_count());
  const double gs = gamma_sigma(sigma);
  Eigen::MatrixXd arg(rows.rows(), feature_count());
  arg.noalias() = rows * z_.transpose() / gs;
  arg.rowwise() += c_.transpose();
  if (phi_out) *phi_out = scale * arg.array().cos();
  if (phi_prime_out) *phi_prime_out = -scale * arg.array().sin();
}

Eigen::MatrixXd RffBasis::phi_block(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                    double sigma) const {
  Eigen::MatrixXd out;
  eval_blocks(rows, sigma, &out, nullptr);
  return out;
}

Eigen::MatrixXd RffBasis::phi_prime_block(
    const Eigen::Ref<const Eigen::MatrixXd>& rows, double sigma) const {
  Eigen::MatrixXd out;
  eval_blocks(rows, sigma, nullptr, &out);
  return out;
}

Eigen::VectorXd RffBasis::phi(const Eigen::Ref<const Eigen::VectorXd>& x,
                              double sigma) const {
  return phi_block(x.transpose(), sigma).row(0).transpose();
}

Eigen::VectorXd RffBasis::phi_prime(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    double sigma) const {
  return phi_prime_block(x.transpose(), sigma).row(0).transpose();
}

double RffBasis::kernel_estimate(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& x2) const {
  return phi(x).dot(phi(x2));
}

}  // namespace tgp
