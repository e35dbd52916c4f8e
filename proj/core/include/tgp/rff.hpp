#ifndef TGP_RFF_HPP
#define TGP_RFF_HPP

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace tgp {

/// Covariance used to draw RFF frequencies. Isotropic by default; the
/// anisotropic variant is built from the data covariance as d*Sigma/tr(Sigma)
/// so that trace(Sigma_z) = d.
struct FrequencyCovariance {
  Eigen::MatrixXd sigma_z;

  static FrequencyCovariance identity(int d) {
    return {Eigen::MatrixXd::Identity(d, d)};
  }
  static FrequencyCovariance from_data_covariance(const Eigen::MatrixXd& sigma);
};

/// Random Fourier feature map phi(x) = sqrt(2/S) cos(Z x / gamma_sigma + c)
/// together with its derivative features. Frequencies Z and phases c are drawn
/// once from the seed and shared across all noise levels sigma; evaluation at
/// noise level sigma divides by gamma_sigma = sqrt(gamma^2 + sigma^2).
///
/// Immutable after construction; evaluation is const and thread-safe.
class RffBasis {
 public:
  static RffBasis sample(int d, int s_count, double gamma,
                         const FrequencyCovariance& cov, std::uint64_t seed);
  static RffBasis sample(int d, int s_count, double gamma, std::uint64_t seed);

  const Eigen::MatrixXd& frequencies() const { return z_; }  // S x d
  const Eigen::VectorXd& phases() const { return c_; }       // S, in [0, 2pi)
  const Eigen::MatrixXd& frequency_covariance() const { return sigma_z_; }
  double gamma() const { return gamma_; }
  int feature_count() const { return static_cast<int>(z_.rows()); }
  int dim() const { return static_cast<int>(z_.cols()); }
  std::uint64_t seed() const { return seed_; }

  double gamma_sigma(double sigma) const {
    return std::sqrt(gamma_ * gamma_ + sigma * sigma);
  }

  /// ||z_s||^2 for every frequency row.
  const Eigen::VectorXd& row_sq_norms() const { return row_sq_norms_; }

  /// Gram matrix Z Z^T.
  const Eigen::MatrixXd& gram() const { return gram_; }

  Eigen::VectorXd phi(const Eigen::Ref<const Eigen::VectorXd>& x,
                      double sigma = 0.0) const;
  Eigen::VectorXd phi_prime(const Eigen::Ref<const Eigen::VectorXd>& x,
                            double sigma = 0.0) const;

  /// Batch evaluation over an N x d block of rows; returns N x S.
  Eigen::MatrixXd phi_block(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                            double sigma = 0.0) const;
  Eigen::MatrixXd phi_prime_block(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  double sigma = 0.0) const;

  /// Computes phi and phi' over one block with a shared argument matrix.
  /// Either output pointer may be null.
  void eval_blocks(const Eigen::Ref<const Eigen::MatrixXd>& rows, double sigma,
                   Eigen::MatrixXd* phi_out, Eigen::MatrixXd* phi_prime_out) const;

  /// Monte-Carlo estimate of the Gaussian kernel exp(-||x-x2||^2 / 2 gamma^2).
  double kernel_estimate(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& x2) const;

  /// FNV-1a over the bytes of Z and c; used to verify seed regeneration.
  std::uint64_t checksum() const { return checksum_; }

 private:
  RffBasis() = default;

  Eigen::MatrixXd z_;        // S x d
  Eigen::VectorXd c_;        // S
  Eigen::MatrixXd sigma_z_;  // d x d
  double gamma_ = 0.0;
  std::uint64_t seed_ = 0;
  Eigen::VectorXd row_sq_norms_;
  std::uint64_t checksum_ = 0;
  Eigen::MatrixXd gram_;  // Z Z^T
};

/// FNV-1a over a raw byte range.
std::uint64_t fnv1a(const void* data, std::size_t bytes,
                    std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace tgp

#endif
