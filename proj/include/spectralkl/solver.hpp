#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spectralkl/filter_bank.hpp"
#include "spectralkl/moment_engine.hpp"
#include "spectralkl/spectral_density.hpp"

namespace spectralkl {

struct SolverConfig {
  int max_iters = 5000;
  /// Fixed-point gap tolerance on ||Theta(Lambda) - Lambda||_F.
  double fp_tol = 1e-9;
  /// Constraint residual tolerance on || integral - I ||_F.
  double residual_tol = 1e-7;
  /// Initial iterate; I/n when empty.
  std::optional<DensityMatrix> initial;
  /// Boundary guard on min eig(Lambda) and min G* Lambda G.
  double min_spectrum_guard = 1e-10;
  /// A nearly singular iterate only terminates the run once the iteration is
  /// essentially stationary; trajectories passing near a rank-deficient
  /// saddle keep going.
  double boundary_stationary_tol = 1e-6;
  QuadratureOptions quadrature;
  ThetaOptions theta;
};

enum class Termination { kConverged, kMaxIterations, kBoundaryApproach };

std::string to_string(Termination t);

struct IterationRecord {
  double fp_gap = 0.0;
  double residual = 0.0;
  double dual_value = 0.0;
  double min_glg = 0.0;
  double min_eig = 0.0;
};

struct SolverReport {
  bool converged = false;
  Termination reason = Termination::kMaxIterations;
  /// For a boundary approach: whether the limit still satisfies the
  /// optimality conditions (positive spectrum + constraint residual).
  bool boundary_validated = false;
  int iterations = 0;
  HermitianMatrix lambda_hat{Matrix::Zero(1, 1)};
  std::vector<IterationRecord> log;  // one record per iterate, length iterations+1
  double final_fp_gap = 0.0;
  double final_residual = 0.0;
  double final_dual_value = 0.0;
  double min_spectrum_at_solution = 0.0;
  /// S(Psi || Phi_hat) evaluated two ways; they agree at a certificate.
  double kl_value = 0.0;
  double kl_value_via_dual_form = 0.0;
  int dual_increase_steps = 0;  // logged steps where the dual value went up
  int quadrature_points_used = 0;
  /// Set by callers that compare against a reference solution.
  std::optional<double> family_distance_to_reference;
};

/// Iterates Lambda_{k+1} = Theta(Lambda_k) until the fixed-point gap and the
/// constraint residual are both below tolerance, the iterate approaches the
/// boundary, or the budget runs out. Requires a feasible bank and a prior
/// with unit zeroth moment.
SolverReport solve(const FilterBank& fb, const SpectralDensity& psi,
                   const SolverConfig& cfg = {});

/// Phi_hat(theta_k) = Psi(theta_k) / (G* Lambda_hat G)(theta_k).
std::vector<double> output_spectrum(const FilterBank& fb, const SpectralDensity& psi,
                                    const HermitianMatrix& lambda_hat,
                                    const UnitCircleGrid& grid,
                                    double spectrum_floor = 1e-10);

/// Strictly positive definite member of the solution family through
/// lambda_circ: (1/2) C C* + eps I + C1 C1*, eps = mu / (4 nu), where C and
/// C1 factor G* Lambda G and G* (Lambda/2 - eps I) G.
HermitianMatrix make_strictly_pd(const FilterBank& fb, const HermitianMatrix& lambda_circ,
                                 const UnitCircleGrid& grid,
                                 const DareOptions& dare_opts = {});

/// || proj_RangeGamma(lambda_a - lambda_b) ||_F; zero iff the two represent
/// the same dual solution.
double family_distance(const GammaDecomposition& gd, const HermitianMatrix& lambda_a,
                       const HermitianMatrix& lambda_b);

}  // namespace spectralkl
