#ifndef TGP_SUFFSTATS_HPP
#define TGP_SUFFSTATS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tgp/base_measure.hpp"
#include "tgp/rff.hpp"

namespace tgp {

/// Noise-level grid {(h-1)/H * sigma_max : h = 1..H}. Always starts at 0.
class NoiseGrid {
 public:
  NoiseGrid(double sigma_max, int h_count);
  static NoiseGrid zero_only();  // {0}

  const std::vector<double>& levels() const { return levels_; }
  int size() const { return static_cast<int>(levels_.size()); }
  double sigma_max() const { return sigma_max_; }
  int h_count() const { return static_cast<int>(levels_.size()); }

 private:
  double sigma_max_ = 0.0;
  std::vector<double> levels_;
};

/// Single-pass, mergeable accumulators for the closed-form learners.
///
/// Per noise level sigma:
///   phi_prime_outer = sum_i phi'_s(x_i) phi'_s(x_i)^T      (S x S)
///   phi_outer       = sum_i phi_s(x_i) phi_s(x_i)^T        (S x S, multi-level grids only)
///   psi_prime       = sum_i phi'_s(x_i) .* Z Sigma_s^{-1} (x_i - mu)
///   psi             = sum_i phi_s(x_i)
///
/// Single-writer; shard across independent accumulators and merge.
class SuffStats {
 public:
  SuffStats(RffBasis basis, BaseMeasure base, NoiseGrid grid);

  /// Adds a block of rows; internally chunked (batch_size rows at a time).
  void accumulate(const Eigen::Ref<const Eigen::MatrixXd>& rows);

  /// Componentwise sum. Throws ConfigError on configuration mismatch.
  void merge(const SuffStats& other);

  std::int64_t n() const { return n_; }
  const RffBasis& basis() const { return basis_; }
  const BaseMeasure& base() const { return base_; }
  const NoiseGrid& grid() const { return grid_; }
  bool tracks_phi_outer() const { return track_phi_outer_; }

  const Eigen::MatrixXd& phi_prime_outer(int level) const;
  const Eigen::MatrixXd& phi_outer(int level) const;
  const Eigen::VectorXd& psi_prime(int level) const;
  const Eigen::VectorXd& psi(int level) const;

  /// Hash over basis checksum, grid and base parameters; merge precondition.
  std::uint64_t config_checksum() const { return config_checksum_; }

  int batch_size() const { return batch_size_; }
  void set_batch_size(int rows_per_batch);

  /// Checkpointing for interruptible ingestion.
  void save_checkpoint(const std::string& path) const;
  static SuffStats load_checkpoint(const std::string& path, RffBasis basis,
                                   BaseMeasure base);

 private:
  void accumulate_batch(const Eigen::Ref<const Eigen::MatrixXd>& rows);

  RffBasis basis_;
  BaseMeasure base_;
  NoiseGrid grid_;
  bool track_phi_outer_ = false;
  int batch_size_ = 8192;
  std::uint64_t config_checksum_ = 0;

  std::int64_t n_ = 0;
  std::vector<Eigen::MatrixXd> phi_prime_outer_;
  std::vector<Eigen::MatrixXd> phi_outer_;
  std::vector<Eigen::VectorXd> psi_prime_;
  std::vector<Eigen::VectorXd> psi_;
  std::vector<Eigen::MatrixXd> sinv_zt_;  // per level: Sigma_sigma^{-1} Z^T, d x S
};

}  // namespace tgp

#endif
