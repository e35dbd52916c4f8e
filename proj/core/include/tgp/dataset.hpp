#ifndef TGP_DATASET_HPP
#define TGP_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tgp {

/// In-memory numeric table. Rows containing NaN/Inf or malformed cells are
/// rejected at ingestion and counted.
struct Dataset {
  Eigen::MatrixXd rows;                   // N x d
  std::vector<std::string> column_names;  // empty when no header
  Eigen::VectorXd centering_offset;       // subtracted at load when centered
  bool centered = false;
  std::size_t rejected_rows = 0;

  Eigen::Index n() const { return rows.rows(); }
  int dim() const { return static_cast<int>(rows.cols()); }
};

struct IngestOptions {
  char delimiter = ',';
  enum class Header { Auto, Yes, No };
  Header header = Header::Auto;
  bool center = false;
  std::size_t max_rows = 0;  // 0 = unlimited
};

/// Parses a delimited numeric text file. Throws IoError when unreadable and
/// ConfigError when no usable rows remain.
Dataset ingest(const std::string& path, const IngestOptions& options = {});

Dataset dataset_from_matrix(Eigen::MatrixXd rows, bool center = false);

/// Writes rows as delimited text, one point per line.
void write_delimited(const std::string& path,
                     const Eigen::Ref<const Eigen::MatrixXd>& rows,
                     char delimiter = ',',
                     const Eigen::VectorXd* weights = nullptr);

}  // namespace tgp

#endif
