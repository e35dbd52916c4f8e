// Versioned binary container shared by model files and accumulator
// checkpoints: a one-line magic + kind tag, a single-line JSON header with an
// ordered array manifest, then raw column-major double payloads. Byte-for-byte
// deterministic for identical inputs.
#ifndef TGP_SRC_CONTAINER_HPP
#define TGP_SRC_CONTAINER_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace tgp::detail {

using OrderedJson = nlohmann::ordered_json;

struct ArrayRecord {
  std::string name;
  Eigen::MatrixXd data;
};

void write_container(const std::string& path, const std::string& kind,
                     OrderedJson header, const std::vector<ArrayRecord>& arrays);

struct Container {
  OrderedJson header;
  std::map<std::string, Eigen::MatrixXd> arrays;
};

/// Throws IoError on missing file, bad magic, or wrong kind.
Container read_container(const std::string& path, const std::string& kind);

}  // namespace tgp::detail

#endif
