#include "tgp/base_measure.hpp"

#include <cmath>

#include "tgp/errors.hpp"

namespace tgp {

namespace {

BaseMeasure::Smoothed factorize(const Eigen::MatrixXd& cov, double sigma) {
  BaseMeasure::Smoothed s;
  s.sigma = sigma;
  s.covariance = cov;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("base measure: covariance is not positive definite");
  s.chol_lower = llt.matrixL();
  s.inverse = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  s.log_det = 2.0 * s.chol_lower.diagonal().array().log().sum();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  const double scale = std::sqrt(static_cast<double>(cov.rows()));
  double inv_err = (cov * s.inverse - id).norm() / scale;
  if (inv_err > 1e-10) {
    // One Newton refinement step for the inverse.
    s.inverse = s.inverse * (2.0 * id - cov * s.inverse);
    s.inverse = 0.5 * (s.inverse + s.inverse.transpose()).eval();
    inv_err = (cov * s.inverse - id).norm() / scale;
  }
  if (!(inv_err <= 1e-10))
    throw NumericalError("base measure: covariance inverse is inaccurate");
  return s;
}

}  // namespace

BaseMeasure::BaseMeasure(Eigen::VectorXd mu, Eigen::MatrixXd sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.size() < 1) throw ConfigError("base measure: dimension must be >= 1");
  if (sigma_.rows() != mu_.size() || sigma_.cols() != mu_.size())
    throw ConfigError("base measure: covariance shape does not match mean");
  if (!sigma_.isApprox(sigma_.transpose(), 1e-10))
    throw ConfigError("base measure: covariance must be symmetric");
  try {
    base_ = factorize(sigma_, 0.0);
  } catch (const NumericalError&) {
    const double jitter = 1e-8 * sigma_.diagonal().mean();
    sigma_.diagonal().array() += jitter;
    base_ = factorize(sigma_, 0.0);  // rethrows if still degenerate
  }
}

BaseMeasure::Smoothed BaseMeasure::smoothed(double sigma) const {
  if (sigma < 0.0) throw ConfigError("base measure: sigma must be >= 0");
  if (sigma == 0.0) return base_;
  Eigen::MatrixXd cov = sigma_;
  cov.diagonal().array() += sigma * sigma;
  return factorize(cov, sigma);
}

double BaseMeasure::log_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                                double sigma) const {
  return log_density_block(x.transpose(), sigma)(0);
}

Eigen::VectorXd BaseMeasure::log_density_block(
    const Eigen::Ref<const Eigen::MatrixXd>& rows, double sigma) const {
  if (rows.cols() != dim())
    throw ConfigError("base measure: point dimension mismatch");
  const Smoothed s = smoothed(sigma);
  const double d = static_cast<double>(dim());
  Eigen::MatrixXd centered = rows;
  centered.rowwise() -= mu_.transpose();
  // Solve L y = (x - mu)^T columnwise; quadratic form is ||y||^2.
  Eigen::MatrixXd y = s.chol_lower.triangularView<Eigen::Lower>().solve(
      centered.transpose());
  Eigen::VectorXd quad = y.colwise().squaredNorm().transpose();
  const double norm_const = -0.5 * (d * std::log(2.0 * M_PI) + s.log_det);
  return (norm_const - 0.5 * quad.array()).matrix();
}

BaseMeasure empirical_base(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 2) throw ConfigError("empirical base: need at least 2 rows");
  Eigen::VectorXd mu = rows.colwise().mean().transpose();
  Eigen::MatrixXd centered = rows;
  centered.rowwise() -= mu.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  return BaseMeasure(std::move(mu), std::move(cov));
}

}  // namespace tgp
