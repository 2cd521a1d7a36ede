// sphexp/matrix_io.hpp
//
// Matrix exchange format: {"dim": r, "re": [[...]], "im": [[...]]}, both
// arrays r x r row-major and always present.
#ifndef SPHEXP_MATRIX_IO_HPP
#define SPHEXP_MATRIX_IO_HPP

#include "sphexp/core.hpp"

#include <json.hpp>

#include <filesystem>

namespace sphexp {

/// Throws Error("bad_matrix_file") on any schema violation.
MatrixXcd matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const MatrixXcd& m);

MatrixXcd read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const MatrixXcd& m);

}  // namespace sphexp

#endif  // SPHEXP_MATRIX_IO_HPP
