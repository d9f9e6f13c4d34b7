#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "spectralkl/config.hpp"
#include "spectralkl/linearized_map.hpp"
#include "spectralkl/log.hpp"
#include "spectralkl/moment_engine.hpp"
#include "spectralkl/report_io.hpp"
#include "spectralkl/solver.hpp"

namespace {

using namespace spectralkl;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitKlModeViolation = 3;
constexpr int kExitMaxIterations = 4;
constexpr int kExitBoundaryUnvalidated = 5;
constexpr int kExitNotAFixedPoint = 6;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string lambda_path;
  std::string data_path;
  bool allow_nonsingular_a = false;
  std::optional<int> grid_override;
  std::optional<std::uint64_t> seed_override;
};

ProblemConfig load_config(const CommonArgs& args) {
  ProblemConfig config = load_problem_config(args.config_path);
  if (args.grid_override) config.spectrum_grid = *args.grid_override;
  if (args.seed_override) config.seed = *args.seed_override;
  return config;
}

int run_feasibility(const CommonArgs& args) {
  const ProblemConfig config = load_config(args);
  const PreparedProblem problem = prepare_problem(config, args.allow_nonsingular_a);
  const GammaDecomposition gd =
      gamma_decomposition(problem.fb, std::max(2 * problem.fb.dim(), 64));
  const FeasibilityVerdict verdict = check_feasibility(problem.fb, gd);

  std::cout << "rank_condition: " << (verdict.rank_condition_ok ? "ok" : "violated")
            << " (lhs " << verdict.rank_lhs << ", rhs " << verdict.rank_rhs << ")\n"
            << "identity_in_range: " << (verdict.identity_in_range_ok ? "ok" : "violated")
            << " (distance " << format_double(verdict.identity_distance) << ")\n"
            << "tests_agree: " << (verdict.tests_agree ? "yes" : "no") << "\n"
            << "n_perp: " << verdict.n_perp << "\n"
            << "singular_A: " << (problem.fb.singular_a() ? "yes" : "no") << "\n"
            << "alpha: " << format_double(problem.alpha) << "\n"
            << "verdict: " << (verdict.feasible ? "feasible" : "infeasible") << "\n";
  return verdict.feasible ? kExitOk : kExitInfeasible;
}

int run_solve(const CommonArgs& args) {
  const ProblemConfig config = load_config(args);
  const PreparedProblem problem = prepare_problem(config, args.allow_nonsingular_a);

  SolverConfig solver_cfg = config.solver;
  const SolverReport report = solve(problem.fb, problem.psi, solver_cfg);

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);

  const UnitCircleGrid grid = UnitCircleGrid::uniform(config.spectrum_grid);
  std::vector<double> psi_values = problem.psi.evaluate(grid);
  std::vector<double> phi_values;
  std::vector<double> glg_values;
  glg_values.reserve(static_cast<size_t>(grid.size));
  bool spectrum_written = false;
  try {
    phi_values = output_spectrum(problem.fb, problem.psi, report.lambda_hat, grid,
                                 solver_cfg.min_spectrum_guard);
    for (int k = 0; k < grid.size; ++k) {
      glg_values.push_back(psi_values[static_cast<size_t>(k)] /
                           phi_values[static_cast<size_t>(k)]);
    }
    write_file_atomic(out / "spectrum.csv",
                      spectrum_to_csv(grid, psi_values, phi_values, glg_values));
    spectrum_written = true;
  } catch (const Error& e) {
    warn(std::string("spectrum export skipped: ") + e.what());
  }

  std::ostringstream rpt;
  rpt << "termination: " << to_string(report.reason) << "\n"
      << "converged: " << (report.converged ? "yes" : "no") << "\n"
      << "boundary_validated: " << (report.boundary_validated ? "yes" : "no") << "\n"
      << "iterations: " << report.iterations << "\n"
      << "final_fp_gap: " << format_double(report.final_fp_gap) << "\n"
      << "final_residual: " << format_double(report.final_residual) << "\n"
      << "final_dual_value: " << format_double(report.final_dual_value) << "\n"
      << "min_g_lambda_g: " << format_double(report.min_spectrum_at_solution) << "\n"
      << "kl_divergence: " << format_double(report.kl_value) << "\n"
      << "kl_via_dual_form: " << format_double(report.kl_value_via_dual_form) << "\n"
      << "dual_increase_steps: " << report.dual_increase_steps << "\n"
      << "logged_steps: " << report.log.size() << "\n"
      << "alpha: " << format_double(problem.alpha) << "\n"
      << "sigma_normalized: " << (problem.sigma_normalized ? "yes" : "no") << "\n"
      << "spectrum_grid: " << config.spectrum_grid << "\n"
      << "quadrature_points: " << report.quadrature_points_used << "\n"
      << "spectrum_written: " << (spectrum_written ? "yes" : "no") << "\n"
      << "seed: " << config.seed << "\n";
  write_file_atomic(out / "report.txt", rpt.str());
  write_file_atomic(out / "iterations.csv", iterations_to_csv(report.log));
  save_matrix_csv(out / "lambda_hat.csv", report.lambda_hat.mat());

  if (report.converged) return kExitOk;
  if (report.reason == Termination::kMaxIterations) return kExitMaxIterations;
  return kExitBoundaryUnvalidated;
}

int run_analyze(const CommonArgs& args) {
  const ProblemConfig config = load_config(args);
  const PreparedProblem problem = prepare_problem(config, args.allow_nonsingular_a);

  Matrix lambda_raw = load_matrix_csv(args.lambda_path);
  if (lambda_raw.rows() != problem.fb.dim()) {
    throw ParseError("lambda file dimension does not match the filter bank");
  }
  const HermitianMatrix lambda(lambda_raw, 1e-10);

  if (lambda.min_eigenvalue() <= 1e-10) {
    std::cout << "not a usable base point: minimum eigenvalue "
              << format_double(lambda.min_eigenvalue()) << " is not positive\n";
    return kExitNotAFixedPoint;
  }

  const GammaDecomposition gd =
      gamma_decomposition(problem.fb, std::max(2 * problem.fb.dim(), 64));
  LinearizedMapRep rep;
  try {
    rep = build_matrix_rep(problem.fb, problem.psi, lambda, gd);
  } catch (const NotAFixedPoint& e) {
    std::cout << "not a fixed point: " << e.what() << "\n";
    return kExitNotAFixedPoint;
  }

  double max_rayleigh = 0.0;
  for (const ExtractedEigenpair& pair : extract_eigenpairs(rep, gd)) {
    if (pair.trace_abs > 1e-8) continue;
    max_rayleigh = std::max(
        max_rayleigh, eigenvalue_rayleigh_check(problem.fb, problem.psi, lambda,
                                                pair.eigenmatrix, pair.eigenvalue.real()));
  }

  const bool realness_ok = rep.max_abs_imag <= 1e-7;
  const bool nonnegative_ok = rep.min_real >= -1e-7;
  const bool multiplicity_ok = rep.eigenvalues_at_one == rep.n_perp;
  const bool gap_ok = rep.spectral_gap > 0.0;
  const bool rayleigh_ok = max_rayleigh <= 1e-6;
  const bool trace_ok = rep.max_column_trace <= 1e-10;
  const bool all_ok = realness_ok && nonnegative_ok && multiplicity_ok && gap_ok &&
                      rayleigh_ok && trace_ok;

  std::ostringstream summary;
  summary << "realness: " << (realness_ok ? "pass" : "fail") << " (max_im "
          << format_double(rep.max_abs_imag) << ")\n"
          << "nonnegativity: " << (nonnegative_ok ? "pass" : "fail") << " (min_re "
          << format_double(rep.min_real) << ")\n"
          << "identity_multiplicity: " << (multiplicity_ok ? "pass" : "fail") << " (count "
          << rep.eigenvalues_at_one << ", n_perp " << rep.n_perp << ")\n"
          << "spectral_gap: " << (gap_ok ? "pass" : "fail") << " (delta "
          << format_double(rep.spectral_gap) << ")\n"
          << "rayleigh_identity: " << (rayleigh_ok ? "pass" : "fail") << " (max_residual "
          << format_double(max_rayleigh) << ")\n"
          << "trace_preservation: " << (trace_ok ? "pass" : "fail") << " (max_column_trace "
          << format_double(rep.max_column_trace) << ")\n"
          << "quadrature_points: " << rep.quadrature_points << "\n"
          << "overall: " << (all_ok ? "pass" : "fail") << "\n";

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  write_file_atomic(out / "m_spectrum.csv", m_spectrum_to_csv(rep));
  write_file_atomic(out / "analysis.txt", summary.str());
  std::cout << summary.str();
  return all_ok ? kExitOk : kExitNotAFixedPoint;
}

int run_estimate_sigma(const CommonArgs& args) {
  const ProblemConfig config = load_config(args);
  FilterBankOptions opts;
  opts.require_singular_a = !args.allow_nonsingular_a;
  const FilterBank raw(config.a, config.b, opts);

  const std::vector<Cplx> samples = load_complex_series(args.data_path);
  const HermitianMatrix sigma = estimate_sigma(raw, samples, 10 * raw.dim());

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  save_matrix_csv(out / "sigma.csv", sigma.mat());
  std::cout << "samples: " << samples.size() << "\n";

  try {
    const FilterBank normalized = normalize_problem(raw, sigma, 1.0, opts);
    const FeasibilityVerdict verdict = check_feasibility(normalized);
    std::cout << "estimated_sigma_feasible: " << (verdict.feasible ? "yes" : "no") << "\n";
  } catch (const SigmaNotPD&) {
    std::cout << "estimated_sigma_feasible: no (estimate not positive definite)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral density approximation under generalized moment constraints"};
  app.require_subcommand(1);

  CommonArgs args;

  const auto add_common = [&args](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", args.config_path, "problem config (JSON)")->required();
    if (needs_out) cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_flag("--allow-nonsingular-A", args.allow_nonsingular_a,
                  "waive the origin-eigenvalue requirement (warning only)");
    cmd->add_option("--grid", args.grid_override, "spectrum export grid size");
    cmd->add_option("--seed", args.seed_override, "seed recorded in reports");
  };

  CLI::App* feasibility = app.add_subcommand("feasibility", "check the moment constraint");
  add_common(feasibility, false);

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the fixed-point iteration");
  add_common(solve_cmd, true);

  CLI::App* analyze = app.add_subcommand("analyze", "spectral analysis at a fixed point");
  add_common(analyze, true);
  analyze->add_option("--lambda", args.lambda_path, "fixed point CSV (re,im interleaved)")
      ->required();

  CLI::App* estimate = app.add_subcommand("estimate-sigma", "state covariance from data");
  add_common(estimate, true);
  estimate->add_option("--data", args.data_path, "time series, one re,im sample per line")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (feasibility->parsed()) return run_feasibility(args);
    if (solve_cmd->parsed()) return run_solve(args);
    if (analyze->parsed()) return run_analyze(args);
    if (estimate->parsed()) return run_estimate_sigma(args);
  } catch (const KlModeViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitKlModeViolation;
  } catch (const InfeasibleProblem& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NotAFixedPoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotAFixedPoint;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
