#include "sphexp/matrix_io.hpp"

#include <fstream>

namespace sphexp {

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error("bad_matrix_file", why); }

void read_plane(const nlohmann::json& j, const char* key, Eigen::Index r, MatrixXcd& m, bool imag) {
  if (!j.contains(key)) bad(std::string("missing \"") + key + "\"");
  const auto& rows = j.at(key);
  if (!rows.is_array() || Eigen::Index(rows.size()) != r) bad(std::string("\"") + key + "\" must have dim rows");
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[std::size_t(i)];
    if (!row.is_array() || Eigen::Index(row.size()) != r) bad(std::string("\"") + key + "\" row length != dim");
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto& v = row[std::size_t(k)];
      if (!v.is_number()) bad(std::string("\"") + key + "\" entries must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x)) bad("non-finite entry");
      if (imag)
        m(i, k).imag(x);
      else
        m(i, k).real(x);
    }
  }
}

}  // namespace

MatrixXcd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("top level must be an object");
  if (!j.contains("dim") || !j.at("dim").is_number_integer()) bad("\"dim\" must be an integer");
  const auto r = j.at("dim").get<std::int64_t>();
  if (r < 1) bad("\"dim\" must be >= 1");
  MatrixXcd m = MatrixXcd::Zero(r, r);
  read_plane(j, "re", r, m, false);
  read_plane(j, "im", r, m, true);
  return m;
}

nlohmann::json matrix_to_json(const MatrixXcd& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

MatrixXcd read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
  return matrix_from_json(j);
}

void write_matrix_file(const std::filesystem::path& path, const MatrixXcd& m) {
  std::ofstream out(path);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  out << matrix_to_json(m).dump(2) << '\n';
}

}  // namespace sphexp
