#include "tgp/model.hpp"

#include <cmath>

#include "tgp/errors.hpp"

namespace tgp {

void Hyperparams::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("hyperparams: gamma must be positive");
  if (!(lambda > 0.0)) throw ConfigError("hyperparams: lambda must be positive");
  if (feature_count < 1) throw ConfigError("hyperparams: S must be >= 1");
  if (!(sigma_max > 0.0)) throw ConfigError("hyperparams: sigma_max must be positive");
  if (noise_levels < 1) throw ConfigError("hyperparams: H must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("hyperparams: eta must be positive");
}

Hyperparams default_hyperparams(const Dataset& data) {
  const Eigen::Index n = data.n();
  const int d = data.dim();
  if (n < 2) throw ConfigError("default hyperparams: need at least 2 rows");
  Eigen::VectorXd mean = data.rows.colwise().mean().transpose();
  Eigen::MatrixXd centered = data.rows;
  centered.rowwise() -= mean.transpose();
  const double tr_v =
      centered.array().square().sum() / static_cast<double>(n - 1);
  if (!(tr_v > 0.0))
    throw ConfigError("default hyperparams: data has zero variance");

  Hyperparams hp;
  hp.gamma = std::pow(static_cast<double>(n), -1.0 / (d + 4)) *
             std::sqrt(tr_v / d);
  hp.sigma_max = std::sqrt(tr_v) / d;
  hp.eta = 1.0 / (hp.gamma * hp.gamma);
  return hp;
}

TgpModel::TgpModel(RffBasis basis, BaseMeasure base, Eigen::VectorXd theta,
                   ModelMeta meta)
    : basis_(std::move(basis)),
      base_(std::move(base)),
      theta_(std::move(theta)),
      meta_(std::move(meta)) {
  if (theta_->size() != basis_.feature_count())
    throw ConfigError("model: theta size does not match basis");
  if (basis_.dim() != base_.dim())
    throw ConfigError("model: basis and base measure dimension mismatch");
}

TgpModel::TgpModel(RffBasis basis, BaseMeasure base, FvpdForm form,
                   ModelMeta meta)
    : basis_(std::move(basis)),
      base_(std::move(base)),
      fvpd_(std::move(form)),
      meta_(std::move(meta)) {
  const int s = basis_.feature_count();
  if (fvpd_->m.size() != s || fvpd_->m_inverse.rows() != s ||
      fvpd_->m_inverse.cols() != s)
    throw ConfigError("model: FVPD form size does not match basis");
  if (basis_.dim() != base_.dim())
    throw ConfigError("model: basis and base measure dimension mismatch");
}

const Eigen::VectorXd& TgpModel::theta() const {
  if (!theta_) throw ConfigError("model: not a theta-form model");
  return *theta_;
}

const FvpdForm& TgpModel::fvpd_form() const {
  if (!fvpd_) throw ConfigError("model: not an FVPD-form model");
  return *fvpd_;
}

void TgpModel::check_sigma(double sigma) const {
  if (sigma < 0.0) throw ConfigError("model: sigma must be >= 0");
  if (fvpd_ && sigma != 0.0)
    throw ConfigError("model: FVPD-form models evaluate at sigma = 0 only");
}

Eigen::VectorXd TgpModel::log_tilt_block(
    const Eigen::Ref<const Eigen::MatrixXd>& rows, double sigma) const {
  check_sigma(sigma);
  Eigen::MatrixXd pts = rows;
  if (meta_.centering_offset.size() == dim())
    pts.rowwise() -= meta_.centering_offset.transpose();
  Eigen::MatrixXd phi = basis_.phi_block(pts, sigma);  // N x S
  if (theta_) return phi * (*theta_);
  // 1/2 phi^T M^{-1} phi - phi^T M^{-1} m, rowwise
  Eigen::MatrixXd minv_phi = phi * fvpd_->m_inverse;  // N x S (M^{-1} symmetric)
  Eigen::VectorXd quad = (phi.array() * minv_phi.array()).rowwise().sum();
  return 0.5 * quad - minv_phi * fvpd_->m;
}

Eigen::VectorXd TgpModel::log_unnorm_density_block(
    const Eigen::Ref<const Eigen::MatrixXd>& rows, double sigma) const {
  Eigen::MatrixXd pts = rows;
  if (meta_.centering_offset.size() == dim())
    pts.rowwise() -= meta_.centering_offset.transpose();
  Eigen::VectorXd tilt = log_tilt_block(rows, sigma);
  return tilt + base_.log_density_block(pts, sigma);
}

double TgpModel::log_unnorm_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    double sigma) const {
  return log_unnorm_density_block(x.transpose(), sigma)(0);
}

Eigen::VectorXd TgpModel::score(const Eigen::Ref<const Eigen::VectorXd>& x,
                                double sigma) const {
  check_sigma(sigma);
  if (!theta_) throw ConfigError("model: score is not defined for FVPD form");
  Eigen::VectorXd xc = x;
  if (meta_.centering_offset.size() == dim()) xc -= meta_.centering_offset;
  const double gs = basis_.gamma_sigma(sigma);
  Eigen::VectorXd phip = basis_.phi_prime(xc, sigma);
  const BaseMeasure::Smoothed s = base_.smoothed(sigma);
  return basis_.frequencies().transpose() * theta_->cwiseProduct(phip) / gs -
         s.inverse * (xc - base_.mu());
}

double TgpModel::hessian_trace(const Eigen::Ref<const Eigen::VectorXd>& x,
                               double sigma) const {
  check_sigma(sigma);
  if (!theta_)
    throw ConfigError("model: hessian trace is not defined for FVPD form");
  Eigen::VectorXd xc = x;
  if (meta_.centering_offset.size() == dim()) xc -= meta_.centering_offset;
  const double gs = basis_.gamma_sigma(sigma);
  Eigen::VectorXd phi = basis_.phi(xc, sigma);
  const BaseMeasure::Smoothed s = base_.smoothed(sigma);
  // phi'' = -phi
  const double tilt_part =
      -(theta_->array() * phi.array() * basis_.row_sq_norms().array()).sum() /
      (gs * gs);
  return tilt_part - s.inverse.trace();
}

TgpModel TgpModel::with_centering_offset(Eigen::VectorXd offset) const {
  if (offset.size() != dim())
    throw ConfigError("model: centering offset dimension mismatch");
  TgpModel copy = *this;
  copy.meta_.centering_offset = std::move(offset);
  return copy;
}

}  // namespace tgp
