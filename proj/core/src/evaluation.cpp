#include "tgp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "tgp/errors.hpp"
#include "tgp/rng.hpp"

namespace tgp {

double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& f,
                   const Eigen::Ref<const Eigen::VectorXd>& g) {
  if (f.size() != g.size() || f.size() == 0)
    throw ConfigError("ks_distance: cdf size mismatch");
  return (f - g).cwiseAbs().maxCoeff();
}

double wasserstein_distance(const Eigen::Ref<const Eigen::VectorXd>& f,
                            const Eigen::Ref<const Eigen::VectorXd>& g,
                            const Eigen::Ref<const Eigen::VectorXd>& grid) {
  if (f.size() != g.size() || f.size() != grid.size() || f.size() < 2)
    throw ConfigError("wasserstein_distance: size mismatch");
  const Eigen::VectorXd diff = (f - g).cwiseAbs();
  double acc = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    acc += 0.5 * (diff(i) + diff(i - 1)) * (grid(i) - grid(i - 1));
  return acc;
}

EvalDensity eval_density(const TgpModel& model) {
  EvalDensity density{model.base(), model.meta().centering_offset, {}, {}};
  density.log_tilt = [&model](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
    return model.log_tilt_block(rows);
  };
  return density;
}

KdeBaseline::KdeBaseline(Eigen::MatrixXd data_rows, double gamma)
    : data_(std::move(data_rows)),
      gamma_(gamma),
      clamped_(std::make_shared<std::int64_t>(0)) {
  if (data_.rows() < 1) throw ConfigError("kde: empty data");
  if (!(gamma_ > 0.0)) throw ConfigError("kde: bandwidth must be positive");
}

KdeBaseline::KdeBaseline(Eigen::MatrixXd data_rows, double gamma,
                         const RffBasis& basis)
    : KdeBaseline(std::move(data_rows), gamma) {
  if (basis.dim() != data_.cols())
    throw ConfigError("kde: basis dimension mismatch");
  basis_ = basis;
  mean_phi_ = Eigen::VectorXd::Zero(basis.feature_count());
  constexpr Eigen::Index kChunk = 8192;
  for (Eigen::Index start = 0; start < data_.rows(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, data_.rows() - start);
    mean_phi_ += basis.phi_block(data_.middleRows(start, len))
                     .colwise()
                     .sum()
                     .transpose();
  }
  mean_phi_ /= static_cast<double>(data_.rows());
}

Eigen::VectorXd KdeBaseline::density_block(
    const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  if (rows.cols() != data_.cols())
    throw ConfigError("kde: query dimension mismatch");
  if (basis_.has_value()) {
    Eigen::VectorXd values = basis_->phi_block(rows) * mean_phi_;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values(i) < 0.0) {
        values(i) = 0.0;
        ++*clamped_;
      }
    }
    return values;
  }
  const double inv_two_g2 = 1.0 / (2.0 * gamma_ * gamma_);
  Eigen::VectorXd values(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::ArrayXd sq =
        (data_.rowwise() - rows.row(i)).rowwise().squaredNorm().array();
    values(i) = (-inv_two_g2 * sq).exp().mean();
  }
  return values;
}

double KdeBaseline::density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return density_block(x.transpose())(0);
}

EvalDensity KdeBaseline::as_eval_density() const {
  EvalDensity density{empirical_base(data_), {}, {}, clamped_};
  const KdeBaseline* self = this;
  density.log_tilt =
      [self, base = density.base](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
        Eigen::VectorXd values = self->density_block(rows);
        Eigen::VectorXd log_tilt(values.size());
        for (Eigen::Index i = 0; i < values.size(); ++i)
          log_tilt(i) = values(i) > 0.0
                            ? std::log(values(i))
                            : -std::numeric_limits<double>::infinity();
        return Eigen::VectorXd(log_tilt - base.log_density_block(rows));
      };
  return density;
}

EvalReport random_projection_eval(const EvalDensity& density,
                                  const Eigen::Ref<const Eigen::MatrixXd>& data,
                                  const EvalConfig& config) {
  if (config.n_directions < 1 || config.grid_points < 2 || config.n_samples < 1)
    throw ConfigError("eval: directions >= 1, grid >= 2, samples >= 1");
  if (data.rows() < 1) throw ConfigError("eval: empty data");
  const Eigen::Index d = data.cols();
  if (density.base.dim() != d) throw ConfigError("eval: dimension mismatch");

  const std::int64_t clamps_before =
      density.clamp_counter ? *density.clamp_counter : 0;
  WeightedSampleSet set =
      draw_weighted_generic(density.base, density.offset, density.log_tilt,
                            config.n_samples, splitmix64(config.seed));

  EvalReport report;
  report.config = config;
  report.directions.resize(config.n_directions, d);
  report.ks.resize(config.n_directions);
  report.wd.resize(config.n_directions);

  Rng rng(config.seed);
  Eigen::VectorXd grid(config.grid_points);
  for (int i = 0; i < config.n_directions; ++i) {
    Eigen::VectorXd v = rng.normal_vector(d);
    while (v.norm() < 1e-12) v = rng.normal_vector(d);
    v /= v.norm();
    report.directions.row(i) = v.transpose();

    const Eigen::VectorXd proj_set = set.points * v;
    const Eigen::VectorXd proj_data = data * v;
    double lo = std::min(proj_set.minCoeff(), proj_data.minCoeff());
    double hi = std::max(proj_set.maxCoeff(), proj_data.maxCoeff());
    double pad = 0.05 * (hi - lo);
    if (!(pad > 0.0)) {
      pad = 1.0;
      ++report.grid_warnings;
    }
    lo -= pad;
    hi += pad;
    grid.setLinSpaced(config.grid_points, lo, hi);

    const Eigen::VectorXd f = weighted_marginal_cdf(set, v, grid);
    const Eigen::VectorXd g = empirical_marginal_cdf(data, v, grid);
    report.ks(i) = ks_distance(f, g);
    report.wd(i) = wasserstein_distance(f, g, grid);
  }

  auto median = [](Eigen::VectorXd values) {
    std::sort(values.data(), values.data() + values.size());
    const Eigen::Index n = values.size();
    return n % 2 == 1 ? values(n / 2)
                      : 0.5 * (values(n / 2 - 1) + values(n / 2));
  };
  report.median_ks = median(report.ks);
  report.mean_ks = report.ks.mean();
  report.median_wd = median(report.wd);
  report.mean_wd = report.wd.mean();
  report.clamped_negative =
      (density.clamp_counter ? *density.clamp_counter : 0) - clamps_before;
  return report;
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_report(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report file: " + path);
  out << "tgp-eval-report 1\n";
  out << "n_directions " << report.config.n_directions << "\n";
  out << "grid_points " << report.config.grid_points << "\n";
  out << "n_samples " << report.config.n_samples << "\n";
  out << "seed " << report.config.seed << "\n";
  out << "clamped_negative " << report.clamped_negative << "\n";
  out << "grid_warnings " << report.grid_warnings << "\n";
  for (Eigen::Index i = 0; i < report.ks.size(); ++i) {
    out << "direction " << i << " ks " << g17(report.ks(i)) << " wd "
        << g17(report.wd(i)) << " v";
    for (Eigen::Index j = 0; j < report.directions.cols(); ++j)
      out << ' ' << g17(report.directions(i, j));
    out << "\n";
  }
  out << "summary median_ks " << g17(report.median_ks) << " mean_ks "
      << g17(report.mean_ks) << " median_wd " << g17(report.median_wd)
      << " mean_wd " << g17(report.mean_wd) << "\n";
  if (!out) throw IoError("failed writing report file: " + path);
}

}  // namespace tgp
