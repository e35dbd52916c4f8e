#include "tgp/model_io.hpp"

#include "container.hpp"
#include "tgp/errors.hpp"

namespace tgp {

using detail::ArrayRecord;
using detail::OrderedJson;

void save_model(const TgpModel& model, const std::string& path) {
  const ModelMeta& meta = model.meta();
  const RffBasis& basis = model.basis();

  OrderedJson header;
  header["algorithm"] = meta.algorithm;
  header["lambda"] = meta.lambda;
  header["eta"] = meta.eta;
  header["sigma_grid"] = meta.sigma_grid;
  header["n_data"] = meta.n_data;
  header["dim"] = model.dim();
  header["feature_count"] = basis.feature_count();
  header["gamma"] = basis.gamma();
  header["basis_seed"] = basis.seed();
  header["basis_checksum"] = basis.checksum();
  header["form"] = model.has_theta() ? "theta" : "fvpd";

  std::vector<ArrayRecord> arrays;
  arrays.push_back({"mu", model.base().mu()});
  arrays.push_back({"sigma", model.base().sigma()});
  arrays.push_back({"sigma_z", basis.frequency_covariance()});
  if (meta.centering_offset.size() > 0)
    arrays.push_back({"centering_offset", meta.centering_offset});
  if (model.has_theta()) {
    arrays.push_back({"theta", model.theta()});
  } else {
    arrays.push_back({"m", model.fvpd_form().m});
    arrays.push_back({"m_inverse", model.fvpd_form().m_inverse});
  }
  detail::write_container(path, "model", std::move(header), arrays);
}

namespace {

Eigen::MatrixXd take(const detail::Container& file, const std::string& name,
                     const std::string& path) {
  auto it = file.arrays.find(name);
  if (it == file.arrays.end())
    throw IoError("model file missing array '" + name + "': " + path);
  return it->second;
}

}  // namespace

TgpModel load_model(const std::string& path) {
  detail::Container file = detail::read_container(path, "model");
  const OrderedJson& header = file.header;
  for (const char* key :
       {"algorithm", "lambda", "eta", "sigma_grid", "n_data", "dim",
        "feature_count", "gamma", "basis_seed", "basis_checksum", "form"})
    if (!header.contains(key))
      throw IoError(std::string("model file missing field '") + key +
                    "': " + path);

  const int d = header["dim"].get<int>();
  const int s_count = header["feature_count"].get<int>();
  const double gamma = header["gamma"].get<double>();
  if (d < 1 || s_count < 1 || !(gamma > 0.0))
    throw IoError("model file has invalid dimensions: " + path);

  Eigen::MatrixXd sigma_z = take(file, "sigma_z", path);
  if (sigma_z.rows() != d || sigma_z.cols() != d)
    throw IoError("model file sigma_z shape mismatch: " + path);
  RffBasis basis =
      RffBasis::sample(d, s_count, gamma, FrequencyCovariance{sigma_z},
                       header["basis_seed"].get<std::uint64_t>());
  if (basis.checksum() != header["basis_checksum"].get<std::uint64_t>())
    throw IoError("model file basis checksum mismatch: " + path);

  Eigen::MatrixXd mu = take(file, "mu", path);
  Eigen::MatrixXd sigma = take(file, "sigma", path);
  if (mu.rows() != d || mu.cols() != 1 || sigma.rows() != d ||
      sigma.cols() != d)
    throw IoError("model file base measure shape mismatch: " + path);
  BaseMeasure base(mu.col(0), sigma);

  ModelMeta meta;
  meta.algorithm = header["algorithm"].get<std::string>();
  meta.lambda = header["lambda"].get<double>();
  meta.eta = header["eta"].get<double>();
  meta.sigma_grid = header["sigma_grid"].get<std::vector<double>>();
  meta.n_data = header["n_data"].get<std::int64_t>();
  if (file.arrays.count("centering_offset")) {
    Eigen::MatrixXd offset = take(file, "centering_offset", path);
    if (offset.rows() != d || offset.cols() != 1)
      throw IoError("model file centering offset shape mismatch: " + path);
    meta.centering_offset = offset.col(0);
  }

  const std::string form = header["form"].get<std::string>();
  if (form == "theta") {
    Eigen::MatrixXd theta = take(file, "theta", path);
    if (theta.rows() != s_count || theta.cols() != 1)
      throw IoError("model file theta shape mismatch: " + path);
    return TgpModel(std::move(basis), std::move(base), theta.col(0),
                    std::move(meta));
  }
  if (form != "fvpd")
    throw IoError("model file has unknown form '" + form + "': " + path);
  FvpdForm fvpd;
  Eigen::MatrixXd m = take(file, "m", path);
  fvpd.m_inverse = take(file, "m_inverse", path);
  if (m.rows() != s_count || m.cols() != 1 ||
      fvpd.m_inverse.rows() != s_count || fvpd.m_inverse.cols() != s_count)
    throw IoError("model file predictive form shape mismatch: " + path);
  fvpd.m = m.col(0);
  return TgpModel(std::move(basis), std::move(base), std::move(fvpd),
                  std::move(meta));
}

}  // namespace tgp
