#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spectralkl/filter_bank.hpp"
#include "spectralkl/solver.hpp"
#include "spectralkl/spectral_density.hpp"

namespace spectralkl {

/// Problem description parsed from a JSON config. Complex entries are
/// written as [re, im]; bare numbers are real.
struct ProblemConfig {
  Matrix a;
  Vector b;
  std::optional<HermitianMatrix> sigma;  // empty means identity
  SpectralFactor prior_factor;           // assembled from "factor" or "rational"
  SolverConfig solver;
  int spectrum_grid = 2048;  // grid for exported spectra
  std::uint64_t seed = 0;
};

ProblemConfig parse_problem_config(const std::string& json_text);
ProblemConfig load_problem_config(const std::string& path);

/// The problem actually handed to the solver: bank similarity-scaled so the
/// constraint reads "covariance = I", prior scaled to unit zeroth moment.
struct PreparedProblem {
  FilterBank fb;
  SpectralDensity psi;
  double alpha = 1.0;        // common zeroth moment of the admissible spectra
  bool sigma_normalized = false;
};

PreparedProblem prepare_problem(const ProblemConfig& config, bool allow_nonsingular_a);

}  // namespace spectralkl
