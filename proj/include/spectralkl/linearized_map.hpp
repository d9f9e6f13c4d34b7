#pragma once

#include <utility>
#include <vector>

#include "spectralkl/filter_bank.hpp"
#include "spectralkl/grid.hpp"
#include "spectralkl/hermitian.hpp"
#include "spectralkl/spectral_density.hpp"

namespace spectralkl {

struct LinearizedOptions {
  QuadratureOptions quadrature;
  /// Constraint residual above which the base point is rejected.
  double fixed_point_tol = 1e-6;
};

/// Matrix representation of the derivative of the fixed-point map at a
/// positive definite fixed point, in the orthonormal Hermitian basis ordered
/// perp-first (kernel of X -> G* X G, then its complement).
struct LinearizedMapRep {
  RealMatrix m;                     // n^2 x n^2
  std::vector<Cplx> eigenvalues;    // of m, unsorted
  int n_perp = 0;
  double identity_block_error = 0.0;  // || top-left block - I ||_max
  double lower_left_error = 0.0;      // || bottom-left block ||_max
  double max_column_trace = 0.0;      // max |tr image| over basis columns
  double max_abs_imag = 0.0;
  double min_real = 0.0;
  int eigenvalues_at_one = 0;  // count within 1e-7 of 1
  double spectral_gap = 0.0;   // 1 - max{Re eig : |eig - 1| > 1e-7}
  int quadrature_points = 0;
};

/// Derivative of the fixed-point map at lambda_circ applied to x:
///   x - L^{1/2} [ integral of (G Psi G*) (G* x G) / (G* L G)^2 ] L^{1/2}.
/// Rejects base points whose constraint residual exceeds fixed_point_tol.
HermitianMatrix apply_m(const FilterBank& fb, const SpectralDensity& psi,
                        const HermitianMatrix& lambda_circ, const HermitianMatrix& x,
                        const LinearizedOptions& opts = {});

LinearizedMapRep build_matrix_rep(const FilterBank& fb, const SpectralDensity& psi,
                                  const HermitianMatrix& lambda_circ,
                                  const GammaDecomposition& gd,
                                  const LinearizedOptions& opts = {});

/// Residual of the eigenvalue identity for a traceless eigenmatrix y with
/// eigenvalue alpha:
///   (1 - alpha) = integral of Psi (G* y G)^2/(G* L G)^2
///                 / tr[(L^{-1/4} y L^{-1/4})^2].
double eigenvalue_rayleigh_check(const FilterBank& fb, const SpectralDensity& psi,
                                 const HermitianMatrix& lambda_circ,
                                 const HermitianMatrix& y, double alpha,
                                 const QuadratureOptions& opts = {});

/// Checks the completely positive form of the derivative:
///   first = || integral of L* L - I ||_F  for
///   L(theta) = Lam^{1/2} G [Psi^{1/2}/(G* Lam G)] G*,
///   second = max relative gap between X - integral of L X L* and apply_m(X)
///   over the basis directions.
std::pair<double, double> lindblad_check(const FilterBank& fb, const SpectralDensity& psi,
                                         const HermitianMatrix& lambda_circ,
                                         const UnitCircleGrid& grid,
                                         const LinearizedOptions& opts = {});

/// || (Theta(L + eps x) - Theta(L)) / eps - apply_m(x) ||_F. The perturbed
/// argument is fed to the map as-is (no trace renormalization).
double finite_difference_consistency(const FilterBank& fb, const SpectralDensity& psi,
                                     const HermitianMatrix& lambda_circ,
                                     const HermitianMatrix& x, double eps,
                                     const LinearizedOptions& opts = {});

/// Eigenpairs of the representation matrix as Hermitian eigenmatrices. Pairs
/// with significant imaginary eigenvalue parts are returned as-is so the
/// realness claim stays checkable.
struct ExtractedEigenpair {
  Cplx eigenvalue;
  HermitianMatrix eigenmatrix;
  double trace_abs = 0.0;
};
std::vector<ExtractedEigenpair> extract_eigenpairs(const LinearizedMapRep& rep,
                                                   const GammaDecomposition& gd);

}  // namespace spectralkl
