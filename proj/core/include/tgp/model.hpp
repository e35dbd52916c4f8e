#ifndef TGP_MODEL_HPP
#define TGP_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tgp/base_measure.hpp"
#include "tgp/dataset.hpp"
#include "tgp/rff.hpp"

namespace tgp {

/// Model hyperparameters with the standard data-derived defaults:
/// gamma from Scott's rule, sigma_max = sqrt(tr V)/d, S = 1000, lambda = 0.1,
/// H = 10, eta = 1/gamma^2.
struct Hyperparams {
  double gamma = 0.0;
  double lambda = 0.1;
  int feature_count = 1000;
  double sigma_max = 0.0;
  int noise_levels = 10;  // H
  double eta = 0.0;

  void validate() const;
};

Hyperparams default_hyperparams(const Dataset& data);

/// Fit provenance carried alongside the parameters.
struct ModelMeta {
  std::string algorithm;             // "map" | "fd" | "ncfd" | "fvpd"
  double lambda = 0.0;
  double eta = 0.0;
  std::vector<double> sigma_grid;    // {0} except for ncfd
  std::int64_t n_data = 0;
  Eigen::VectorXd centering_offset;  // empty or d-vector
};

/// Quadratic-form parameters of the variational predictive density.
struct FvpdForm {
  Eigen::MatrixXd m_inverse;  // M^{-1}, S x S symmetric
  Eigen::VectorXd m;          // S
};

/// A fitted GP-tilted density: exp(tilt(x)) * N(x | mu, Sigma_sigma),
/// unnormalized. theta-form models carry the weight vector theta; FVPD models
/// carry the quadratic form (M^{-1}, m) and only evaluate at sigma = 0.
///
/// Public coordinates are the original data coordinates: when a centering
/// offset is recorded, inputs are shifted internally before evaluation.
/// Immutable after construction; evaluation is const and thread-safe.
class TgpModel {
 public:
  TgpModel(RffBasis basis, BaseMeasure base, Eigen::VectorXd theta,
           ModelMeta meta);
  TgpModel(RffBasis basis, BaseMeasure base, FvpdForm form, ModelMeta meta);

  bool has_theta() const { return theta_.has_value(); }
  const Eigen::VectorXd& theta() const;
  const FvpdForm& fvpd_form() const;
  const RffBasis& basis() const { return basis_; }
  const BaseMeasure& base() const { return base_; }
  const ModelMeta& meta() const { return meta_; }
  int dim() const { return base_.dim(); }

  double log_unnorm_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                            double sigma = 0.0) const;
  Eigen::VectorXd log_unnorm_density_block(
      const Eigen::Ref<const Eigen::MatrixXd>& rows, double sigma = 0.0) const;

  /// log of the exponential tilt term alone (theta^T phi_sigma, or the FVPD
  /// quadratic form at sigma = 0).
  Eigen::VectorXd log_tilt_block(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                 double sigma = 0.0) const;

  /// Gradient of log_unnorm_density in x. theta-form only.
  Eigen::VectorXd score(const Eigen::Ref<const Eigen::VectorXd>& x,
                        double sigma = 0.0) const;

  /// Trace of the Hessian of log_unnorm_density in x. theta-form only.
  double hessian_trace(const Eigen::Ref<const Eigen::VectorXd>& x,
                       double sigma = 0.0) const;

  /// Copy with a recorded centering offset (original = centered + offset).
  TgpModel with_centering_offset(Eigen::VectorXd offset) const;

 private:
  void check_sigma(double sigma) const;

  RffBasis basis_;
  BaseMeasure base_;
  std::optional<Eigen::VectorXd> theta_;
  std::optional<FvpdForm> fvpd_;
  ModelMeta meta_;
};

}  // namespace tgp

#endif
