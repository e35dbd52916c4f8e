#ifndef TGP_EVALUATION_HPP
#define TGP_EVALUATION_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "tgp/dataset.hpp"
#include "tgp/model.hpp"
#include "tgp/sampling.hpp"

namespace tgp {

/// sup over the shared grid of |F - G|.
double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& f,
                   const Eigen::Ref<const Eigen::VectorXd>& g);

/// Trapezoidal integral of |F - G| over the grid.
double wasserstein_distance(const Eigen::Ref<const Eigen::VectorXd>& f,
                            const Eigen::Ref<const Eigen::VectorXd>& g,
                            const Eigen::Ref<const Eigen::VectorXd>& grid);

struct EvalConfig {
  int n_directions = 500;
  int grid_points = 10000;
  Eigen::Index n_samples = 250000;  // base draws shared by every direction
  std::uint64_t seed = 0;
  int threads = 0;  // 0: TGP_THREADS env var, else 1
};

struct EvalReport {
  Eigen::MatrixXd directions;  // n_directions x d unit rows
  Eigen::VectorXd ks;
  Eigen::VectorXd wd;
  double median_ks = 0.0, mean_ks = 0.0;
  double median_wd = 0.0, mean_wd = 0.0;
  EvalConfig config;
  std::int64_t clamped_negative = 0;  // RFF-KDE negative density clamps
  std::int64_t grid_warnings = 0;
};

/// A density in importance-sampling form: the Gaussian proposal plus a
/// log-tilt evaluated at original-coordinate rows.
struct EvalDensity {
  BaseMeasure base;
  Eigen::VectorXd offset;  // original = proposal draw + offset; may be empty
  std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::MatrixXd>&)> log_tilt;
  std::shared_ptr<std::int64_t> clamp_counter;  // optional diagnostics
};

EvalDensity eval_density(const TgpModel& model);

/// Classic kernel density baselines sharing the Gaussian kernel width.
class KdeBaseline {
 public:
  /// Exact mode: unnormalized mean kernel (1/N) sum_i exp(-||x-x_i||^2/2g^2).
  KdeBaseline(Eigen::MatrixXd data_rows, double gamma);
  /// RFF mode: phi(x)^T mean-phi; negative values clamp to 0 and count.
  KdeBaseline(Eigen::MatrixXd data_rows, double gamma, const RffBasis& basis);

  double density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd density_block(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;
  std::int64_t clamped_count() const { return *clamped_; }
  bool rff_mode() const { return basis_.has_value(); }

  /// Importance-sampling form against the empirical base of the data.
  EvalDensity as_eval_density() const;

 private:
  Eigen::MatrixXd data_;
  double gamma_;
  std::optional<RffBasis> basis_;
  Eigen::VectorXd mean_phi_;
  std::shared_ptr<std::int64_t> clamped_;
};

/// Sliced KS/WD comparison along random unit directions, one shared weighted
/// sample set across all directions.
EvalReport random_projection_eval(const EvalDensity& density,
                                  const Eigen::Ref<const Eigen::MatrixXd>& data,
                                  const EvalConfig& config);

/// Versioned text report: one record per direction plus a summary block.
void write_report(const EvalReport& report, const std::string& path);

}  // namespace tgp

#endif
