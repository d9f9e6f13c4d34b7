#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spectralkl/grid.hpp"
#include "spectralkl/hermitian.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

struct FilterBankOptions {
  /// Require at least one eigenvalue of A at the origin. When waived the
  /// constructor emits a warning instead of throwing.
  bool require_singular_a = true;
  double rank_tol = 1e-10;
  double origin_eigenvalue_tol = 1e-10;
};

/// The bank of filters G(z) = (zI - A)^{-1} B with A stable and (A, B)
/// reachable.
class FilterBank {
 public:
  FilterBank(Matrix a, Vector b, const FilterBankOptions& opts = {});

  int dim() const noexcept { return static_cast<int>(a_.rows()); }
  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }

  /// G(z); z must not be an eigenvalue of A.
  Vector evaluate(Cplx z) const;

  double spectral_radius_a() const noexcept { return rho_a_; }
  bool singular_a() const noexcept { return singular_a_; }

 private:
  Matrix a_;
  Vector b_;
  double rho_a_ = 0.0;
  bool singular_a_ = false;
};

/// Samples of G over a grid; shared by quadrature routines.
std::vector<Vector> sample_on_grid(const FilterBank& fb, const UnitCircleGrid& grid);

/// Real values of G*(e^{j theta_k}) Lambda G(e^{j theta_k}) for precomputed samples.
std::vector<double> quadratic_form_samples(std::span<const Vector> g_samples,
                                           const HermitianMatrix& lambda);

/// Splitting of the Hermitian space into the sampled kernel of X -> G* X G
/// (perp_basis) and its orthogonal complement (range_basis).
struct GammaDecomposition {
  std::vector<HermitianMatrix> perp_basis;
  std::vector<HermitianMatrix> range_basis;
  int n_perp = 0;
  HermitianBasis basis;  // coordinate basis used for the splitting
};

struct FeasibilityVerdict {
  bool feasible = false;
  bool rank_condition_ok = false;
  bool identity_in_range_ok = false;
  bool tests_agree = false;
  int rank_lhs = 0;
  int rank_rhs = 0;
  double identity_distance = 0.0;  // || I - proj_RangeGamma(I) ||_F
  int n_perp = 0;
};

/// Similarity-scales the bank so that the moment constraint reads
/// "steady covariance = I" and the zeroth moment of admissible spectra is 1:
/// A' = S^{-1/2} A S^{1/2}, B' = sqrt(alpha) S^{-1/2} B.
FilterBank normalize_problem(const FilterBank& fb, const HermitianMatrix& sigma,
                             double alpha, const FilterBankOptions& opts = {});

/// Unique solution of  Xi = A Xi A* + B B*; positive definite by reachability.
HermitianMatrix steady_state_covariance(const FilterBank& fb);

/// The common zeroth moment of all spectra satisfying the (Sigma = I) moment
/// constraint, defined when A is singular: 1/|v* B|^2 for a unit left null
/// vector v of A. Empty when A has no eigenvalue at the origin.
std::optional<double> constant_zeroth_moment(const FilterBank& fb, double tol = 1e-10);

/// Kernel/complement splitting of X -> G* X G sampled on a uniform grid.
/// grid_size must be at least 2n so that the sampled map determines the
/// underlying trigonometric polynomial.
GammaDecomposition gamma_decomposition(const FilterBank& fb, int grid_size,
                                       double svd_rel_tol = 1e-8);

/// Feasibility of the (normalized) moment constraint: the rank test on
/// [I - AA*, B; B*, 0] and the distance of I from the range basis must agree.
FeasibilityVerdict check_feasibility(const FilterBank& fb);
FeasibilityVerdict check_feasibility(const FilterBank& fb, const GammaDecomposition& gd);

/// State covariance estimated by running x(t+1) = A x(t) + B y(t) over the
/// sample sequence from x(0) = 0 and averaging x x* past the burn-in.
HermitianMatrix estimate_sigma(const FilterBank& fb, std::span<const Cplx> samples,
                               int burn_in);

}  // namespace spectralkl
