#pragma once

#include <filesystem>
#include <string>

#include "qfdiv/linalg.hpp"

namespace qfdiv {

// Hermiticity tolerance applied by the JSON loader.
inline constexpr double kLoaderHermitianTol = 1e-10;

// {"dim": n, "re": [[...]], "im": [[...]]}; "im" may be omitted for real matrices.
HermitianOperator parse_matrix_json(const std::string& text);
HermitianOperator load_matrix_json(const std::filesystem::path& path);

std::string dump_matrix_json(const Matrix& m);

}  // namespace qfdiv
