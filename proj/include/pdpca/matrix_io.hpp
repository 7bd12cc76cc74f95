#pragma once

// PDM1 binary layout: "PDM1", u64 LE rows, u64 LE cols, rows*cols f64 LE
// row-major. CSV: one row per line, comma-separated, no header.

#include <filesystem>
#include <iosfwd>

#include "pdpca/linalg.hpp"

namespace pdpca {

DataMatrix read_pdm1(std::istream& in);
void write_pdm1(std::ostream& out, const DataMatrix& m);

DataMatrix read_pdm1(const std::filesystem::path& path);
void write_pdm1(const std::filesystem::path& path, const DataMatrix& m);

DataMatrix read_csv_matrix(std::istream& in);
DataMatrix read_csv_matrix(const std::filesystem::path& path);

// Dispatches on the leading magic bytes, falling back to CSV.
DataMatrix load_matrix(const std::filesystem::path& path);

// Writes to `path.tmp` then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace pdpca
