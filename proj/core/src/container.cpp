#include "container.hpp"

#include <fstream>

#include "tgp/errors.hpp"

namespace tgp::detail {

void write_container(const std::string& path, const std::string& kind,
                     OrderedJson header, const std::vector<ArrayRecord>& arrays) {
  OrderedJson manifest = OrderedJson::array();
  for (const auto& a : arrays)
    manifest.push_back({a.name, a.data.rows(), a.data.cols()});
  header["arrays"] = manifest;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "TGPBIN 1 " << kind << '\n';
  out << header.dump() << '\n';
  for (const auto& a : arrays) {
    out.write(reinterpret_cast<const char*>(a.data.data()),
              static_cast<std::streamsize>(sizeof(double) * a.data.size()));
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

Container read_container(const std::string& path, const std::string& kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string magic;
  std::getline(in, magic);
  if (magic != "TGPBIN 1 " + kind)
    throw IoError("'" + path + "' is not a " + kind + " file");
  std::string header_line;
  std::getline(in, header_line);
  Container c;
  try {
    c.header = OrderedJson::parse(header_line);
  } catch (const std::exception& e) {
    throw IoError("corrupt header in '" + path + "': " + e.what());
  }
  if (!c.header.contains("arrays"))
    throw IoError("missing array manifest in '" + path + "'");
  for (const auto& entry : c.header["arrays"]) {
    const std::string name = entry[0].get<std::string>();
    const Eigen::Index rows = entry[1].get<Eigen::Index>();
    const Eigen::Index cols = entry[2].get<Eigen::Index>();
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw IoError("truncated payload in '" + path + "'");
    c.arrays.emplace(name, std::move(m));
  }
  return c;
}

}  // namespace tgp::detail
