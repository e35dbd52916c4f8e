#ifndef TGP_SAMPLING_HPP
#define TGP_SAMPLING_HPP

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "tgp/model.hpp"

namespace tgp {

/// Draws from the base Gaussian weighted by the model's tilt factor; the
/// self-normalized discrete distribution approximates the fitted density.
/// Weights are stored as exp(log tilt - offset) with the shared offset kept
/// separately, so no weight overflows for any finite parameters.
struct WeightedSampleSet {
  Eigen::MatrixXd points;  // n_s x d, original coordinates
  Eigen::VectorXd weights; // scaled tilt factors, >= 0
  double log_weight_offset = 0.0;
  std::uint64_t seed = 0;

  /// Weights normalized to sum to 1.
  Eigen::VectorXd normalized() const;
  /// Effective sample size (sum w)^2 / sum w^2.
  double effective_sample_size() const;
  /// Monte-Carlo estimate of the normalizing constant int tilt(x) N(x) dx.
  double normalizer_estimate() const;
};

/// exp of the tilt exponent at x (theta^T phi(x), or the FVPD quadratic form).
double tilt_factor(const TgpModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x);

WeightedSampleSet draw_weighted(const TgpModel& model, Eigen::Index n_samples,
                                std::uint64_t seed);

/// Same mechanism for an arbitrary log-tilt over the base Gaussian (used by
/// the KDE baselines). `offset` shifts draws into original coordinates and may
/// be empty; `log_tilt` receives original-coordinate rows.
WeightedSampleSet draw_weighted_generic(
    const BaseMeasure& base, const Eigen::VectorXd& offset,
    const std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::MatrixXd>&)>&
        log_tilt,
    Eigen::Index n_samples, std::uint64_t seed);

/// Multinomial resampling proportional to the weights.
Eigen::MatrixXd resample(const WeightedSampleSet& set, Eigen::Index k,
                         std::uint64_t seed);

/// F(alpha) = sum_s w_s 1{v^T x_s <= alpha} / sum_s w_s on a sorted grid.
Eigen::VectorXd weighted_marginal_cdf(const WeightedSampleSet& set,
                                      const Eigen::Ref<const Eigen::VectorXd>& v,
                                      const Eigen::Ref<const Eigen::VectorXd>& grid);

/// Empirical (unweighted) projection CDF of data rows on the same grid.
Eigen::VectorXd empirical_marginal_cdf(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                       const Eigen::Ref<const Eigen::VectorXd>& v,
                                       const Eigen::Ref<const Eigen::VectorXd>& grid);

}  // namespace tgp

#endif
