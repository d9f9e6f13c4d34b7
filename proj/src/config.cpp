#include "spectralkl/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace spectralkl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

Cplx parse_complex(const json& value, const std::string& where) {
  if (value.is_number()) return Cplx(value.get<double>(), 0.0);
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return Cplx(value[0].get<double>(), value[1].get<double>());
  }
  fail(where, "expected a number or an [re, im] pair");
}

Matrix parse_matrix(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty()) fail(where, "expected a non-empty array of rows");
  const size_t rows = value.size();
  if (!value[0].is_array() || value[0].empty()) fail(where, "rows must be non-empty arrays");
  const size_t cols = value[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    if (!value[i].is_array() || value[i].size() != cols) {
      fail(where + "[" + std::to_string(i) + "]", "ragged matrix rows");
    }
    for (size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_complex(
          value[i][j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

Vector parse_vector(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty()) fail(where, "expected a non-empty array");
  // Accept either a flat list or a column of singleton rows.
  Vector v(static_cast<Eigen::Index>(value.size()));
  for (size_t i = 0; i < value.size(); ++i) {
    const json& entry = value[i];
    const std::string entry_where = where + "[" + std::to_string(i) + "]";
    if (entry.is_array() && entry.size() == 1) {
      v(static_cast<Eigen::Index>(i)) = parse_complex(entry[0], entry_where);
    } else {
      v(static_cast<Eigen::Index>(i)) = parse_complex(entry, entry_where);
    }
  }
  return v;
}

std::vector<double> parse_real_list(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty()) fail(where, "expected a non-empty array");
  std::vector<double> values;
  values.reserve(value.size());
  for (size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      fail(where + "[" + std::to_string(i) + "]", "expected a real number");
    }
    values.push_back(value[i].get<double>());
  }
  return values;
}

SpectralFactor parse_prior(const json& prior) {
  if (prior.contains("factor")) {
    const json& f = prior["factor"];
    for (const char* key : {"F", "G", "H", "D"}) {
      if (!f.contains(key)) fail("prior.factor", std::string("missing field ") + key);
    }
    if (f["F"].is_array() && f["F"].empty()) {
      return SpectralFactor::constant(parse_complex(f["D"], "prior.factor.D"));
    }
    Matrix fm = parse_matrix(f["F"], "prior.factor.F");
    Vector g = parse_vector(f["G"], "prior.factor.G");
    Vector h_col = parse_vector(f["H"], "prior.factor.H");
    const Cplx d = parse_complex(f["D"], "prior.factor.D");
    try {
      return SpectralFactor(std::move(fm), std::move(g), h_col.transpose(), d);
    } catch (const Error& e) {
      fail("prior.factor", e.what());
    }
  }
  if (prior.contains("rational")) {
    const json& r = prior["rational"];
    if (!r.contains("num")) fail("prior.rational", "missing field num");
    const std::vector<double> num = parse_real_list(r["num"], "prior.rational.num");
    std::vector<double> den{1.0};
    if (r.contains("den")) den = parse_real_list(r["den"], "prior.rational.den");
    try {
      return SpectralFactor::from_rational(num, den);
    } catch (const Error& e) {
      fail("prior.rational", e.what());
    }
  }
  fail("prior", "expected either a factor or a rational description");
}

}  // namespace

ProblemConfig parse_problem_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!root.contains("filter")) fail("config", "missing field filter");
  const json& filter = root["filter"];
  if (!filter.contains("A") || !filter.contains("B")) {
    fail("filter", "missing field A or B");
  }
  if (!root.contains("prior")) fail("config", "missing field prior");

  Matrix a = parse_matrix(filter["A"], "filter.A");
  Vector b = parse_vector(filter["B"], "filter.B");
  if (a.rows() != a.cols()) fail("filter.A", "matrix must be square");
  if (b.size() != a.rows()) fail("filter.B", "length must match the state dimension");

  ProblemConfig config{std::move(a),    std::move(b), std::nullopt,
                       parse_prior(root["prior"]),    SolverConfig{},
                       2048,            0};

  if (root.contains("sigma") && !(root["sigma"].is_string())) {
    const Matrix sigma = parse_matrix(root["sigma"], "sigma");
    if (sigma.rows() != config.a.rows()) fail("sigma", "dimension must match filter.A");
    try {
      config.sigma = HermitianMatrix(sigma);
    } catch (const Error& e) {
      fail("sigma", e.what());
    }
  } else if (root.contains("sigma") && root["sigma"].is_string() &&
             root["sigma"].get<std::string>() != "identity") {
    fail("sigma", "expected a matrix or the string \"identity\"");
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    if (s.contains("max_iters")) config.solver.max_iters = s["max_iters"].get<int>();
    if (s.contains("fp_tol")) config.solver.fp_tol = s["fp_tol"].get<double>();
    if (s.contains("residual_tol")) {
      config.solver.residual_tol = s["residual_tol"].get<double>();
    }
    if (s.contains("min_spectrum_guard")) {
      config.solver.min_spectrum_guard = s["min_spectrum_guard"].get<double>();
    }
    if (s.contains("grid")) config.spectrum_grid = s["grid"].get<int>();
    if (s.contains("quadrature_initial")) {
      config.solver.quadrature.initial_points = s["quadrature_initial"].get<int>();
    }
    if (s.contains("quadrature_max")) {
      config.solver.quadrature.max_points = s["quadrature_max"].get<int>();
    }
  }
  if (root.contains("seed")) config.seed = root["seed"].get<std::uint64_t>();
  if (config.spectrum_grid < 2) fail("solver.grid", "grid must have at least 2 points");
  return config;
}

ProblemConfig load_problem_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_config(buffer.str());
}

PreparedProblem prepare_problem(const ProblemConfig& config, bool allow_nonsingular_a) {
  FilterBankOptions opts;
  opts.require_singular_a = !allow_nonsingular_a;

  FilterBank raw(config.a, config.b, opts);
  HermitianMatrix sigma =
      config.sigma.value_or(HermitianMatrix::identity(raw.dim()));
  const bool sigma_normalized = config.sigma.has_value();

  // First fold Sigma into the bank, then rescale by the common zeroth moment
  // of the admissible spectra so the prior can be normalized to match.
  FilterBank sigma_scaled = normalize_problem(raw, sigma, 1.0, opts);
  const std::optional<double> alpha_opt = constant_zeroth_moment(sigma_scaled);
  const double alpha = alpha_opt.value_or(1.0);
  FilterBank fb = normalize_problem(sigma_scaled, HermitianMatrix::identity(raw.dim()),
                                    alpha, opts);

  SpectralDensity prior{config.prior_factor};
  SpectralDensity psi = normalize_zeroth_moment(prior, 1.0, config.solver.quadrature);
  return PreparedProblem{std::move(fb), std::move(psi), alpha, sigma_normalized};
}

}  // namespace spectralkl
