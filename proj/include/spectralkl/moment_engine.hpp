#pragma once

#include "spectralkl/filter_bank.hpp"
#include "spectralkl/grid.hpp"
#include "spectralkl/hermitian.hpp"
#include "spectralkl/riccati.hpp"
#include "spectralkl/spectral_density.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

/// Cascade realization of G W^{-1} W_Psi used for the covariance route:
///   F_hat = [[F, 0], [B b^{-1/2} H, Z]],  G_hat = [G_psi; B b^{-1/2} D].
struct AugmentedRealization {
  Matrix f_hat;
  Vector g_hat;
  int prior_order = 0;
  int state_dim = 0;
};

AugmentedRealization augment_realization(const FilterBank& fb, const SpectralFactor& w_psi,
                                         const FactorizationResult& fr);

/// integral of G [Psi / (G* Lambda G)] G* as the bottom-right block of the
/// steady-state covariance of the cascade filter.
HermitianMatrix moment_integral_lyapunov(const FilterBank& fb, const SpectralDensity& psi,
                                         const HermitianMatrix& lambda,
                                         const DareOptions& dare_opts = {});
HermitianMatrix moment_integral_lyapunov(const FilterBank& fb, const SpectralDensity& psi,
                                         const FactorizationResult& fr);

/// Same integral by grid-doubled trapezoidal quadrature; the independent
/// cross-check of the covariance route.
HermitianMatrix moment_integral_quadrature(const FilterBank& fb, const SpectralDensity& psi,
                                           const HermitianMatrix& lambda,
                                           const QuadratureOptions& opts = {},
                                           double spectrum_floor = 1e-10);

struct ThetaOptions {
  DareOptions dare;
  /// Eigenvalues of the image in [-clamp, 0) are clamped to zero.
  double clamp = 1e-12;
  /// Trace tolerance used to validate the image as a density matrix.
  double trace_tol = 1e-10;
  /// Fall back to the quadrature route when the Riccati solve fails while
  /// the spectrum scan is still positive.
  bool quadrature_fallback = true;
};

/// The fixed-point map on density matrices:
///   Lambda  ->  Lambda^{1/2} [ integral of G Psi/(G* Lambda G) G* ] Lambda^{1/2}.
/// Preserves trace, positive semidefiniteness and the kernel.
DensityMatrix theta(const FilterBank& fb, const SpectralDensity& psi,
                    const DensityMatrix& lambda, const ThetaOptions& opts = {});

/// Same map evaluated on a raw PSD Hermitian argument, without the density
/// validation of the image; used for finite-difference probes.
HermitianMatrix theta_unnormalized(const FilterBank& fb, const SpectralDensity& psi,
                                   const HermitianMatrix& lambda,
                                   const ThetaOptions& opts = {});

/// Dual objective  - integral of Psi log(G* Lambda G) + tr(Lambda).
double dual_value(const FilterBank& fb, const SpectralDensity& psi,
                  const HermitianMatrix& lambda, const QuadratureOptions& opts = {},
                  double spectrum_floor = 1e-10);

/// Directional derivative of the dual objective:
///   - integral of Psi (G* X G)/(G* Lambda G) + tr(X).
double dual_directional_derivative(const FilterBank& fb, const SpectralDensity& psi,
                                   const HermitianMatrix& lambda, const HermitianMatrix& x,
                                   const QuadratureOptions& opts = {},
                                   double spectrum_floor = 1e-10);

/// || integral of G Psi/(G* Lambda G) G*  -  I ||_F (covariance route).
double constraint_residual(const FilterBank& fb, const SpectralDensity& psi,
                           const HermitianMatrix& lambda,
                           const DareOptions& dare_opts = {});

}  // namespace spectralkl
