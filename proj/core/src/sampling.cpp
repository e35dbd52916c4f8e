#include "tgp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgp/errors.hpp"
#include "tgp/rng.hpp"

namespace tgp {

Eigen::VectorXd WeightedSampleSet::normalized() const {
  const double total = weights.sum();
  if (!(total > 0.0)) throw NumericalError("sample set: all weights are zero");
  return weights / total;
}

double WeightedSampleSet::effective_sample_size() const {
  const double total = weights.sum();
  const double total_sq = weights.squaredNorm();
  if (!(total_sq > 0.0)) throw NumericalError("sample set: all weights are zero");
  return total * total / total_sq;
}

double WeightedSampleSet::normalizer_estimate() const {
  return std::exp(log_weight_offset) * weights.mean();
}

double tilt_factor(const TgpModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::exp(model.log_tilt_block(x.transpose())(0));
}

WeightedSampleSet draw_weighted_generic(
    const BaseMeasure& base, const Eigen::VectorXd& offset,
    const std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::MatrixXd>&)>&
        log_tilt,
    Eigen::Index n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("draw_weighted: sample count must be >= 1");
  Rng rng(seed);
  const auto smoothed = base.smoothed(0.0);

  WeightedSampleSet set;
  set.seed = seed;
  set.points.resize(n_samples, base.dim());
  Eigen::VectorXd log_w(n_samples);
  constexpr Eigen::Index kChunk = 8192;
  for (Eigen::Index start = 0; start < n_samples; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, n_samples - start);
    Eigen::MatrixXd draws =
        rng.normal_matrix(len, base.dim()) * smoothed.chol_lower.transpose();
    draws.rowwise() += base.mu().transpose();
    if (offset.size() == base.dim()) draws.rowwise() += offset.transpose();
    set.points.middleRows(start, len) = draws;
    log_w.segment(start, len) = log_tilt(draws);
  }
  set.log_weight_offset = log_w.maxCoeff();
  set.weights = (log_w.array() - set.log_weight_offset).exp();
  return set;
}

WeightedSampleSet draw_weighted(const TgpModel& model, Eigen::Index n_samples,
                                std::uint64_t seed) {
  const Eigen::VectorXd& offset = model.meta().centering_offset;
  return draw_weighted_generic(
      model.base(), offset,
      [&model](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
        return model.log_tilt_block(rows);
      },
      n_samples, seed);
}

Eigen::MatrixXd resample(const WeightedSampleSet& set, Eigen::Index k,
                         std::uint64_t seed) {
  if (k < 1) throw ConfigError("resample: output count must be >= 1");
  const Eigen::Index n = set.weights.size();
  Eigen::VectorXd cumulative(n);
  std::partial_sum(set.weights.data(), set.weights.data() + n,
                   cumulative.data());
  const double total = cumulative(n - 1);
  if (!(total > 0.0)) throw NumericalError("resample: all weights are zero");

  Rng rng(seed);
  Eigen::MatrixXd out(k, set.points.cols());
  for (Eigen::Index i = 0; i < k; ++i) {
    const double u = rng.uniform() * total;
    const auto it =
        std::upper_bound(cumulative.data(), cumulative.data() + n, u);
    Eigen::Index idx = std::min<Eigen::Index>(it - cumulative.data(), n - 1);
    out.row(i) = set.points.row(idx);
  }
  return out;
}

namespace {

Eigen::VectorXd projection_cdf(const Eigen::VectorXd& projections,
                               const Eigen::VectorXd* weights,
                               const Eigen::Ref<const Eigen::VectorXd>& grid) {
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid(i) >= grid(i - 1)))
      throw ConfigError("cdf: grid must be sorted ascending");

  const Eigen::Index n = projections.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return projections(a) < projections(b);
  });

  double total = weights ? weights->sum() : static_cast<double>(n);
  if (!(total > 0.0)) throw NumericalError("cdf: zero total weight");

  Eigen::VectorXd cdf(grid.size());
  double running = 0.0;
  Eigen::Index j = 0;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    while (j < n && projections(order[j]) <= grid(g)) {
      running += weights ? (*weights)(order[j]) : 1.0;
      ++j;
    }
    cdf(g) = running / total;
  }
  return cdf;
}

}  // namespace

Eigen::VectorXd weighted_marginal_cdf(const WeightedSampleSet& set,
                                      const Eigen::Ref<const Eigen::VectorXd>& v,
                                      const Eigen::Ref<const Eigen::VectorXd>& grid) {
  if (v.size() != set.points.cols())
    throw ConfigError("cdf: direction dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10)
    throw ConfigError("cdf: direction must be a unit vector");
  Eigen::VectorXd projections = set.points * v;
  return projection_cdf(projections, &set.weights, grid);
}

Eigen::VectorXd empirical_marginal_cdf(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                       const Eigen::Ref<const Eigen::VectorXd>& v,
                                       const Eigen::Ref<const Eigen::VectorXd>& grid) {
  if (v.size() != rows.cols())
    throw ConfigError("cdf: direction dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10)
    throw ConfigError("cdf: direction must be a unit vector");
  Eigen::VectorXd projections = rows * v;
  return projection_cdf(projections, nullptr, grid);
}

}  // namespace tgp
