#pragma once
// Plain-CSV matrix persistence (one row per state) used for observation
// models and cost matrices.

#include <string>

#include "herd/types.hpp"

namespace herd {

Matrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const Matrix& m);

}  // namespace herd
