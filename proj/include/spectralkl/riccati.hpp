#pragma once

#include "spectralkl/filter_bank.hpp"
#include "spectralkl/grid.hpp"
#include "spectralkl/hermitian.hpp"
#include "spectralkl/spectral_density.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

struct DareOptions {
  /// Floor for the minimum of G* Lambda G on the circle; below it the solve
  /// reports SpectrumNotPositive.
  double spectrum_floor = 1e-10;
  QuadratureOptions scan;
  /// When non-negative, the caller certifies this value as the minimum of
  /// G* Lambda G on the circle and the adaptive scan is skipped.
  double known_min_spectrum = -1.0;
  /// Residual acceptance threshold, relative to max(1, ||P||_F).
  double residual_tol = 1e-8;
  /// Fallback recursion controls.
  int recursion_max_iters = 20000;
  double recursion_tol = 1e-12;
  /// Try the difference recursion before the subspace method; the two routes
  /// must agree, which the tests exercise through this switch.
  bool prefer_recursion = false;
};

/// Stabilizing solution of
///   P = A* P A - A* P B (B* P B)^{-1} B* P A + Lambda
/// together with the spectral factor W of G* Lambda G and the closed-loop
/// matrix Z = A - B (B* P B)^{-1} B* P A.
struct FactorizationResult {
  HermitianMatrix p;
  Matrix z;
  double b_scalar = 0.0;  // B* P B > 0
  SpectralFactor w;       // quadruple (A, B, b^{-1/2} B* P A, b^{1/2})

  // diagnostics
  double dare_residual = 0.0;  // relative to max(1, ||P||_F)
  double rho_z = 0.0;
  double min_spectrum = 0.0;  // min of G* Lambda G found by the pre-scan
  bool used_fallback_recursion = false;
};

/// Minimum of G* Lambda G over the circle, grid-doubled until stable.
double min_spectrum_value(const FilterBank& fb, const HermitianMatrix& lambda,
                          const QuadratureOptions& opts = {});

FactorizationResult solve_dare(const FilterBank& fb, const HermitianMatrix& lambda,
                               const DareOptions& opts = {});

/// Max over the grid of |[G* 1] K [G; 1]| for
/// K = [[A* Pi A - Pi, A* Pi B], [B* Pi A, B* Pi B]]; identically zero for
/// every Hermitian Pi.
double verify_popov_identity(const FilterBank& fb, const HermitianMatrix& pi,
                             const UnitCircleGrid& grid);

/// State-space quadruple of W^{-1}:
///   W^{-1}(z) = [I - b^{-1} B* P A (zI - Z)^{-1} B] b^{-1/2}.
SpectralFactor factor_inverse(const FilterBank& fb, const FactorizationResult& fr);

/// The vector C with G* C C* G = G* Lambda G on the circle:
/// C = b^{-1/2} P B.
Vector construct_c_vector(const FilterBank& fb, const FactorizationResult& fr);

}  // namespace spectralkl
