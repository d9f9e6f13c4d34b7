#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spectralkl/linearized_map.hpp"
#include "spectralkl/solver.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

/// Shortest representation that round-trips a double (17 significant digits).
std::string format_double(double value);

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Complex matrix as CSV: one row per matrix row, entries interleaved re,im.
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv_text(const std::string& text);
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_csv(const std::filesystem::path& path);

std::string iterations_to_csv(const std::vector<IterationRecord>& log);

std::string spectrum_to_csv(const UnitCircleGrid& grid, const std::vector<double>& psi,
                            const std::vector<double>& phi,
                            const std::vector<double>& glg);

std::string m_spectrum_to_csv(const LinearizedMapRep& rep);

/// One complex sample per line, "re,im" (a bare real is accepted).
std::vector<Cplx> load_complex_series(const std::filesystem::path& path);

}  // namespace spectralkl
