#pragma once

#include <string>

#include "permanental/linalg.hpp"

namespace perm {

/// Parse {"n": int, "rows": [[...], ...]} or whitespace text with one row per line.
/// The format is detected from the first non-blank character.
Matrix parse_matrix(const std::string& text);
Matrix read_matrix_file(const std::string& path);

/// JSON text {"n": n, "rows": [...]} with round-trip precision.
std::string matrix_to_json(const Matrix& m);

std::string read_text_file(const std::string& path);

}  // namespace perm
