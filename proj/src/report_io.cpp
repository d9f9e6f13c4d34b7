#include "spectralkl/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace spectralkl {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(m(i, j).real()) << "," << format_double(m(i, j).imag());
    }
    out << "\n";
  }
  return out.str();
}

Matrix matrix_from_csv_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ParseError("matrix csv: bad number '" + field + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix csv: no data");
  const size_t n = rows.size();
  for (const auto& row : rows) {
    if (row.size() != 2 * n) {
      throw ParseError("matrix csv: expected " + std::to_string(2 * n) +
                       " values per row (re,im interleaved)");
    }
  }
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Cplx(rows[i][2 * j], rows[i][2 * j + 1]);
    }
  }
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  write_file_atomic(path, matrix_to_csv(m));
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return matrix_from_csv_text(buffer.str());
}

std::string iterations_to_csv(const std::vector<IterationRecord>& log) {
  std::ostringstream out;
  out << "k,fp_gap,residual,dual_value,min_glg,min_eig\n";
  for (size_t k = 0; k < log.size(); ++k) {
    out << k << "," << format_double(log[k].fp_gap) << "," << format_double(log[k].residual)
        << "," << format_double(log[k].dual_value) << "," << format_double(log[k].min_glg)
        << "," << format_double(log[k].min_eig) << "\n";
  }
  return out.str();
}

std::string spectrum_to_csv(const UnitCircleGrid& grid, const std::vector<double>& psi,
                            const std::vector<double>& phi,
                            const std::vector<double>& glg) {
  if (static_cast<int>(psi.size()) != grid.size ||
      static_cast<int>(phi.size()) != grid.size ||
      static_cast<int>(glg.size()) != grid.size) {
    throw DimensionMismatch("spectrum csv: sample lengths differ from the grid");
  }
  std::ostringstream out;
  out << "theta,psi,phi_hat,g_lambda_g\n";
  for (int k = 0; k < grid.size; ++k) {
    out << format_double(grid.angle(k)) << "," << format_double(psi[static_cast<size_t>(k)])
        << "," << format_double(phi[static_cast<size_t>(k)]) << ","
        << format_double(glg[static_cast<size_t>(k)]) << "\n";
  }
  return out.str();
}

std::string m_spectrum_to_csv(const LinearizedMapRep& rep) {
  std::ostringstream out;
  out << "re_lambda,im_lambda,classified\n";
  for (const Cplx& ev : rep.eigenvalues) {
    const bool at_one = std::abs(ev - Cplx(1.0, 0.0)) <= 1e-7;
    out << format_double(ev.real()) << "," << format_double(ev.imag()) << ","
        << (at_one ? "identity-block" : "contractive") << "\n";
  }
  return out.str();
}

std::vector<Cplx> load_complex_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<Cplx> samples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string re_text, im_text;
    std::getline(fields, re_text, ',');
    const bool has_imag = static_cast<bool>(std::getline(fields, im_text, ','));
    try {
      const double re = std::stod(re_text);
      const double im = has_imag ? std::stod(im_text) : 0.0;
      samples.emplace_back(re, im);
    } catch (const std::exception&) {
      throw ParseError("sample file line " + std::to_string(line_no) + ": bad number");
    }
  }
  return samples;
}

}  // namespace spectralkl
