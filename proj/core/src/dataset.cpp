#include "tgp/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tgp/errors.hpp"

namespace tgp {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

bool parse_cell(const std::string& cell, double* out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  *out = v;
  return true;
}

bool parse_row(const std::string& line, char delimiter, std::vector<double>* out) {
  const auto cells = split_line(line, delimiter);
  out->clear();
  out->reserve(cells.size());
  for (const auto& cell : cells) {
    double v = 0.0;
    if (!parse_cell(cell, &v) || !std::isfinite(v)) return false;
    out->push_back(v);
  }
  return !out->empty();
}

}  // namespace

Dataset ingest(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("ingest: cannot open '" + path + "'");

  Dataset ds;
  std::vector<std::vector<double>> accepted;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  bool header_consumed = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const bool ok = parse_row(line, options.delimiter, &row);
    if (!header_consumed) {
      header_consumed = true;
      const bool treat_as_header =
          options.header == IngestOptions::Header::Yes ||
          (options.header == IngestOptions::Header::Auto && !ok);
      if (treat_as_header) {
        for (const auto& name : split_line(line, options.delimiter))
          ds.column_names.push_back(name);
        continue;
      }
    }
    if (!ok || (!accepted.empty() && row.size() != accepted.front().size())) {
      ++ds.rejected_rows;
      continue;
    }
    accepted.push_back(row);
    if (options.max_rows > 0 && accepted.size() >= options.max_rows) break;
  }

  if (accepted.empty()) throw ConfigError("ingest: no usable rows in '" + path + "'");

  const Eigen::Index n = static_cast<Eigen::Index>(accepted.size());
  const Eigen::Index d = static_cast<Eigen::Index>(accepted.front().size());
  ds.rows.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) ds.rows(i, j) = accepted[i][j];

  ds.centering_offset = Eigen::VectorXd::Zero(d);
  if (options.center) {
    ds.centering_offset = ds.rows.colwise().mean().transpose();
    ds.rows.rowwise() -= ds.centering_offset.transpose();
    ds.centered = true;
  }
  return ds;
}

Dataset dataset_from_matrix(Eigen::MatrixXd rows, bool center) {
  Dataset ds;
  ds.rows = std::move(rows);
  ds.centering_offset = Eigen::VectorXd::Zero(ds.rows.cols());
  if (center) {
    ds.centering_offset = ds.rows.colwise().mean().transpose();
    ds.rows.rowwise() -= ds.centering_offset.transpose();
    ds.centered = true;
  }
  return ds;
}

void write_delimited(const std::string& path,
                     const Eigen::Ref<const Eigen::MatrixXd>& rows,
                     char delimiter, const Eigen::VectorXd* weights) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  char buf[64];
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", rows(i, j));
      if (j > 0) out << delimiter;
      out << buf;
    }
    if (weights) {
      std::snprintf(buf, sizeof(buf), "%.17g", (*weights)(i));
      out << delimiter << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace tgp
