#ifndef TGP_BASE_MEASURE_HPP
#define TGP_BASE_MEASURE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace tgp {

/// Gaussian base measure N(mu, Sigma) and its sigma-smoothed family
/// Sigma_sigma = Sigma + sigma^2 I. Immutable after construction.
class BaseMeasure {
 public:
  /// Factorization state for one smoothing level.
  struct Smoothed {
    double sigma = 0.0;
    Eigen::MatrixXd covariance;   // Sigma + sigma^2 I
    Eigen::MatrixXd inverse;
    Eigen::MatrixXd chol_lower;   // L with L L^T = covariance
    double log_det = 0.0;
  };

  /// Throws NumericalError if Sigma cannot be factorized even after a small
  /// diagonal jitter (1e-8 * mean diagonal) is applied.
  BaseMeasure(Eigen::VectorXd mu, Eigen::MatrixXd sigma);

  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  int dim() const { return static_cast<int>(mu_.size()); }

  /// Factorizes Sigma + sigma^2 I. sigma = 0 returns the cached base factors.
  Smoothed smoothed(double sigma) const;

  /// log N(x | mu, Sigma + sigma^2 I)
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                     double sigma = 0.0) const;
  Eigen::VectorXd log_density_block(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                    double sigma = 0.0) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Smoothed base_;  // sigma = 0 factors
};

/// mu = sample mean, Sigma = sample covariance (N-1 normalization).
/// Throws NumericalError when the covariance is degenerate after jitter.
BaseMeasure empirical_base(const Eigen::Ref<const Eigen::MatrixXd>& rows);

}  // namespace tgp

#endif
