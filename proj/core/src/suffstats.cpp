#include "tgp/suffstats.hpp"

#include "container.hpp"
#include "tgp/errors.hpp"

namespace tgp {

NoiseGrid::NoiseGrid(double sigma_max, int h_count) : sigma_max_(sigma_max) {
  if (h_count < 1) throw ConfigError("noise grid: H must be >= 1");
  if (h_count > 1 && !(sigma_max > 0.0))
    throw ConfigError("noise grid: sigma_max must be positive when H > 1");
  levels_.reserve(h_count);
  for (int h = 1; h <= h_count; ++h)
    levels_.push_back((h - 1) * sigma_max / h_count);
}

NoiseGrid NoiseGrid::zero_only() { return NoiseGrid(0.0, 1); }

SuffStats::SuffStats(RffBasis basis, BaseMeasure base, NoiseGrid grid)
    : basis_(std::move(basis)), base_(std::move(base)), grid_(std::move(grid)) {
  if (basis_.dim() != base_.dim())
    throw ConfigError("suffstats: basis and base measure dimension mismatch");
  const int s = basis_.feature_count();
  const int levels = grid_.size();
  // phi_outer feeds only the multi-level (noise conditional) system.
  track_phi_outer_ = levels > 1;

  phi_prime_outer_.assign(levels, Eigen::MatrixXd::Zero(s, s));
  if (track_phi_outer_) phi_outer_.assign(levels, Eigen::MatrixXd::Zero(s, s));
  psi_prime_.assign(levels, Eigen::VectorXd::Zero(s));
  psi_.assign(levels, Eigen::VectorXd::Zero(s));
  sinv_zt_.reserve(levels);
  for (int l = 0; l < levels; ++l) {
    const auto sm = base_.smoothed(grid_.levels()[l]);
    sinv_zt_.push_back(sm.inverse * basis_.frequencies().transpose());
  }

  std::uint64_t h = basis_.checksum();
  h = fnv1a(grid_.levels().data(), sizeof(double) * grid_.levels().size(), h);
  h = fnv1a(base_.mu().data(), sizeof(double) * base_.mu().size(), h);
  h = fnv1a(base_.sigma().data(), sizeof(double) * base_.sigma().size(), h);
  config_checksum_ = h;
}

void SuffStats::set_batch_size(int rows_per_batch) {
  if (rows_per_batch < 1) throw ConfigError("suffstats: batch size must be >= 1");
  batch_size_ = rows_per_batch;
}

void SuffStats::accumulate(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.rows() == 0) return;
  if (rows.cols() != basis_.dim())
    throw ConfigError("suffstats: row dimension does not match basis");
  for (Eigen::Index start = 0; start < rows.rows(); start += batch_size_) {
    const Eigen::Index len = std::min<Eigen::Index>(batch_size_, rows.rows() - start);
    accumulate_batch(rows.middleRows(start, len));
  }
}

void SuffStats::accumulate_batch(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd centered = rows;
  centered.rowwise() -= base_.mu().transpose();
  Eigen::MatrixXd phi, phip;
  for (int l = 0; l < grid_.size(); ++l) {
    const double sigma = grid_.levels()[l];
    basis_.eval_blocks(rows, sigma, &phi, &phip);  // N x S each
    phi_prime_outer_[l].selfadjointView<Eigen::Lower>().rankUpdate(
        phip.transpose());
    if (track_phi_outer_)
      phi_outer_[l].selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
    // v_i = Z Sigma_sigma^{-1} (x_i - mu), batched as centered * (Sinv Z^T)
    Eigen::MatrixXd v = centered * sinv_zt_[l];  // N x S
    psi_prime_[l].noalias() +=
        (phip.array() * v.array()).colwise().sum().matrix().transpose();
    psi_[l].noalias() += phi.colwise().sum().transpose();
  }
  n_ += n;
  // Mirror the lower-triangle rank updates.
  for (int l = 0; l < grid_.size(); ++l) {
    phi_prime_outer_[l].triangularView<Eigen::StrictlyUpper>() =
        phi_prime_outer_[l].transpose();
    if (track_phi_outer_)
      phi_outer_[l].triangularView<Eigen::StrictlyUpper>() =
          phi_outer_[l].transpose();
  }
}

void SuffStats::merge(const SuffStats& other) {
  if (config_checksum_ != other.config_checksum_)
    throw ConfigError("suffstats: cannot merge accumulators with different configuration");
  n_ += other.n_;
  for (int l = 0; l < grid_.size(); ++l) {
    phi_prime_outer_[l] += other.phi_prime_outer_[l];
    if (track_phi_outer_) phi_outer_[l] += other.phi_outer_[l];
    psi_prime_[l] += other.psi_prime_[l];
    psi_[l] += other.psi_[l];
  }
}

const Eigen::MatrixXd& SuffStats::phi_prime_outer(int level) const {
  return phi_prime_outer_.at(level);
}

const Eigen::MatrixXd& SuffStats::phi_outer(int level) const {
  if (!track_phi_outer_)
    throw ConfigError("suffstats: phi outer products are not tracked on a single-level grid");
  return phi_outer_.at(level);
}

const Eigen::VectorXd& SuffStats::psi_prime(int level) const {
  return psi_prime_.at(level);
}

const Eigen::VectorXd& SuffStats::psi(int level) const { return psi_.at(level); }

void SuffStats::save_checkpoint(const std::string& path) const {
  detail::OrderedJson header;
  header["config_checksum"] = config_checksum_;
  header["n"] = n_;
  header["sigma_max"] = grid_.sigma_max();
  header["h"] = grid_.h_count();
  std::vector<detail::ArrayRecord> arrays;
  for (int l = 0; l < grid_.size(); ++l) {
    const std::string tag = std::to_string(l);
    arrays.push_back({"phi_prime_outer_" + tag, phi_prime_outer_[l]});
    if (track_phi_outer_) arrays.push_back({"phi_outer_" + tag, phi_outer_[l]});
    arrays.push_back({"psi_prime_" + tag, psi_prime_[l]});
    arrays.push_back({"psi_" + tag, psi_[l]});
  }
  detail::write_container(path, "suffstats", std::move(header), arrays);
}

SuffStats SuffStats::load_checkpoint(const std::string& path, RffBasis basis,
                                     BaseMeasure base) {
  const auto c = detail::read_container(path, "suffstats");
  NoiseGrid grid(c.header["sigma_max"].get<double>(), c.header["h"].get<int>());
  SuffStats stats(std::move(basis), std::move(base), grid);
  if (stats.config_checksum_ != c.header["config_checksum"].get<std::uint64_t>())
    throw IoError("checkpoint configuration does not match basis/base/grid");
  stats.n_ = c.header["n"].get<std::int64_t>();
  for (int l = 0; l < stats.grid_.size(); ++l) {
    const std::string tag = std::to_string(l);
    stats.phi_prime_outer_[l] = c.arrays.at("phi_prime_outer_" + tag);
    if (stats.track_phi_outer_) stats.phi_outer_[l] = c.arrays.at("phi_outer_" + tag);
    stats.psi_prime_[l] = c.arrays.at("psi_prime_" + tag);
    stats.psi_[l] = c.arrays.at("psi_" + tag);
  }
  return stats;
}

}  // namespace tgp
