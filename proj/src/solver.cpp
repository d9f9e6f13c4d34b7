#include "spectralkl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spectralkl/log.hpp"
#include "spectralkl/riccati.hpp"

namespace spectralkl {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "converged";
    case Termination::kMaxIterations:
      return "max-iterations";
    case Termination::kBoundaryApproach:
      return "boundary-approach";
  }
  return "unknown";
}

SolverReport solve(const FilterBank& fb, const SpectralDensity& psi, const SolverConfig& cfg) {
  const int n = fb.dim();
  if (!(cfg.fp_tol > 0.0) || !(cfg.residual_tol > 0.0) || !(cfg.min_spectrum_guard > 0.0) ||
      cfg.max_iters < 0) {
    throw Error("solver: tolerances must be positive");
  }

  const FeasibilityVerdict verdict = check_feasibility(fb);
  if (!verdict.feasible) {
    std::ostringstream oss;
    oss << "problem infeasible: identity distance " << verdict.identity_distance
        << ", rank " << verdict.rank_lhs << " vs " << verdict.rank_rhs;
    throw InfeasibleProblem(oss.str());
  }
  const double psi_moment = psi.zeroth_moment(cfg.quadrature);
  if (std::abs(psi_moment - 1.0) > 1e-6) {
    std::ostringstream oss;
    oss << "prior has zeroth moment " << psi_moment << "; normalize it to 1 before solving";
    throw InvalidPrior(oss.str());
  }

  DensityMatrix lambda = cfg.initial.value_or(DensityMatrix::uniform(n));
  if (lambda.dim() != n) throw DimensionMismatch("solver: initial iterate dimension");

  ThetaOptions theta_opts = cfg.theta;
  theta_opts.dare.spectrum_floor = cfg.min_spectrum_guard;
  theta_opts.dare.scan = cfg.quadrature;

  // The bank and the prior are fixed across the run: pick the logging grid
  // once (adaptively, at the initial iterate) and sample them up front. Per
  // iteration only G* Lambda G changes.
  const auto initial_dual = adaptive_circle_integral(
      [&](double theta) {
        const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
        const double glg = (g.adjoint() * lambda.mat() * g).value().real();
        if (glg <= 0.0) throw SpectrumNotPositive("solver: bad initial iterate");
        return psi.evaluate(theta) * std::log(glg);
      },
      cfg.quadrature);
  const int quadrature_points =
      std::min(2 * initial_dual.points, cfg.quadrature.max_points);
  const UnitCircleGrid log_grid = UnitCircleGrid::uniform(quadrature_points);
  const std::vector<Vector> g_samples = sample_on_grid(fb, log_grid);
  std::vector<double> psi_samples(static_cast<size_t>(log_grid.size));
  for (int k = 0; k < log_grid.size; ++k) {
    psi_samples[static_cast<size_t>(k)] = psi.evaluate(log_grid.angle(k));
  }

  SolverReport report;
  report.lambda_hat = lambda.hermitian();
  double previous_dual = 0.0;

  for (int k = 0;; ++k) {
    const std::vector<double> glg = quadratic_form_samples(g_samples, lambda.hermitian());
    const double min_glg = *std::min_element(glg.begin(), glg.end());
    const double min_eig = lambda.hermitian().min_eigenvalue();

    report.iterations = k;
    report.lambda_hat = lambda.hermitian();
    report.min_spectrum_at_solution = min_glg;

    if (min_glg <= cfg.min_spectrum_guard) {
      if (k == 0) {
        throw SpectrumNotPositive(
            "solver: the initial iterate leaves G* Lambda G non-positive");
      }
      // The factorization route degenerated; validate the optimality
      // conditions at the stop point by quadrature (still finite for a
      // positive minimum) and report the boundary approach.
      double residual_q = std::numeric_limits<double>::infinity();
      double fp_gap_q = std::numeric_limits<double>::infinity();
      if (min_glg > 0.0) {
        try {
          const HermitianMatrix integral =
              moment_integral_quadrature(fb, psi, lambda.hermitian(), cfg.quadrature, 0.0);
          residual_q = (integral.mat() - Matrix::Identity(n, n)).norm();
          const Matrix root = principal_sqrt(lambda.hermitian()).mat();
          fp_gap_q = (root * integral.mat() * root - lambda.mat()).norm();
        } catch (const Error&) {
        }
      }
      report.log.push_back({fp_gap_q, residual_q, previous_dual, min_glg, min_eig});
      report.final_residual = residual_q;
      report.final_fp_gap = fp_gap_q;
      report.reason = Termination::kBoundaryApproach;
      report.boundary_validated = min_glg > 0.0 && residual_q <= cfg.residual_tol;
      report.converged = report.boundary_validated;
      break;
    }

    // Evaluate the certificate quantities at the current iterate.
    DareOptions dare = theta_opts.dare;
    dare.known_min_spectrum = min_glg;
    FactorizationResult fr = solve_dare(fb, lambda.hermitian(), dare);
    const HermitianMatrix integral = moment_integral_lyapunov(fb, psi, fr);
    const double residual =
        (integral.mat() - Matrix::Identity(n, n)).norm();
    const HermitianMatrix root = principal_sqrt(lambda.hermitian());
    const Matrix image = root.mat() * integral.mat() * root.mat();
    HermitianMatrix next_raw(0.5 * (image + image.adjoint().eval()));
    next_raw = clamp_tiny_negative_eigenvalues(next_raw, theta_opts.clamp);
    const double fp_gap = (next_raw.mat() - lambda.mat()).norm();

    std::vector<double> dual_integrand(glg.size());
    for (size_t i = 0; i < glg.size(); ++i) {
      dual_integrand[i] = psi_samples[i] * std::log(glg[i]);
    }
    const double dual_value_k =
        -circle_quadrature(dual_integrand) + lambda.hermitian().trace();

    report.log.push_back({fp_gap, residual, dual_value_k, min_glg, min_eig});
    if (k > 0 && dual_value_k > previous_dual + 1e-12) {
      ++report.dual_increase_steps;
    }
    previous_dual = dual_value_k;

    report.final_fp_gap = fp_gap;
    report.final_residual = residual;
    report.final_dual_value = dual_value_k;

    if (fp_gap <= cfg.fp_tol && residual <= cfg.residual_tol) {
      report.converged = true;
      report.reason = Termination::kConverged;
      break;
    }
    const bool stationary_singular = min_eig < cfg.min_spectrum_guard &&
                                     fp_gap <= cfg.boundary_stationary_tol;
    if (stationary_singular) {
      // The iterate settled on the boundary of the cone; the conditions were
      // evaluated above, so validate and report. A small eigenvalue with the
      // iteration still in motion is a saddle pass, not a limit, and does
      // not stop the run.
      report.reason = Termination::kBoundaryApproach;
      report.boundary_validated = residual <= cfg.residual_tol;
      report.converged = report.boundary_validated;
      break;
    }
    if (k >= cfg.max_iters) {
      report.reason = Termination::kMaxIterations;
      break;
    }
    lambda = DensityMatrix(next_raw, theta_opts.trace_tol);
  }

  report.quadrature_points_used = quadrature_points;

  // KL of the certified spectrum, by substitution and in the dual form.
  const UnitCircleGrid kl_grid = UnitCircleGrid::uniform(
      std::max(cfg.quadrature.initial_points, quadrature_points));
  try {
    const std::vector<double> phi =
        output_spectrum(fb, psi, report.lambda_hat, kl_grid, cfg.min_spectrum_guard);
    report.kl_value = kl_divergence(psi, phi, kl_grid);
    report.kl_value_via_dual_form =
        adaptive_circle_integral(
            [&](double theta) {
              const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
              const double glg =
                  (g.adjoint() * report.lambda_hat.mat() * g).value().real();
              return psi.evaluate(theta) * std::log(glg);
            },
            cfg.quadrature)
            .value;
  } catch (const Error& e) {
    log_info(std::string("final spectrum evaluation failed: ") + e.what());
  }
  return report;
}

std::vector<double> output_spectrum(const FilterBank& fb, const SpectralDensity& psi,
                                    const HermitianMatrix& lambda_hat,
                                    const UnitCircleGrid& grid, double spectrum_floor) {
  std::vector<double> phi;
  phi.reserve(static_cast<size_t>(grid.size));
  for (int k = 0; k < grid.size; ++k) {
    const Vector g = fb.evaluate(grid.point(k));
    const double glg = (g.adjoint() * lambda_hat.mat() * g).value().real();
    if (glg <= spectrum_floor) {
      throw SpectrumNotPositive("output spectrum: G* Lambda G not positive on the grid");
    }
    phi.push_back(psi.evaluate(grid.angle(k)) / glg);
  }
  return phi;
}

HermitianMatrix make_strictly_pd(const FilterBank& fb, const HermitianMatrix& lambda_circ,
                                 const UnitCircleGrid& grid, const DareOptions& dare_opts) {
  const int n = fb.dim();
  double mu = 0.0;
  double nu = 0.0;
  for (int k = 0; k < grid.size; ++k) {
    const Vector g = fb.evaluate(grid.point(k));
    const double glg = (g.adjoint() * lambda_circ.mat() * g).value().real();
    const double gg = g.squaredNorm();
    mu = k == 0 ? glg : std::min(mu, glg);
    nu = std::max(nu, gg);
  }
  if (mu <= dare_opts.spectrum_floor) {
    throw SpectrumNotPositive("make_strictly_pd: G* Lambda G not positive on the grid");
  }
  const double eps = mu / (4.0 * nu);

  const Vector c0 = construct_c_vector(fb, solve_dare(fb, lambda_circ, dare_opts));
  const HermitianMatrix shifted(0.5 * lambda_circ.mat() - eps * Matrix::Identity(n, n));
  const Vector c1 = construct_c_vector(fb, solve_dare(fb, shifted, dare_opts));

  const Matrix candidate = 0.5 * (c0 * c0.adjoint()) + eps * Matrix::Identity(n, n) +
                           c1 * c1.adjoint();
  HermitianMatrix result(0.5 * (candidate + candidate.adjoint().eval()));
  if (result.min_eigenvalue() < 0.5 * eps) {
    throw Error("make_strictly_pd: construction lost definiteness");
  }
  return result;
}

double family_distance(const GammaDecomposition& gd, const HermitianMatrix& lambda_a,
                       const HermitianMatrix& lambda_b) {
  if (lambda_a.dim() != lambda_b.dim()) {
    throw DimensionMismatch("family_distance: dimension mismatch");
  }
  const HermitianMatrix diff(lambda_a.mat() - lambda_b.mat());
  double sum_sq = 0.0;
  for (const HermitianMatrix& r : gd.range_basis) {
    const double coeff = inner(diff, r);
    sum_sq += coeff * coeff;
  }
  return std::sqrt(sum_sq);
}

}  // namespace spectralkl
