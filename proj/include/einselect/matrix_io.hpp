// matrix_io.hpp — Operator CSV format: a `dim=<d>` header line, then one row
// per matrix row with comma-separated re:im entries.

#pragma once

#include "einselect/linalg.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace einselect::io {

void write_matrix_csv(std::ostream& os, const QOperator& m);
void write_matrix_csv(const std::filesystem::path& path, const QOperator& m);

QOperator read_matrix_csv(std::istream& is, const std::string& what = "matrix csv");
QOperator read_matrix_csv(const std::filesystem::path& path);

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double x);

} // namespace einselect::io
