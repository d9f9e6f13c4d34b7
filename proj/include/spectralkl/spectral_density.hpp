#pragma once

#include <span>
#include <vector>

#include "spectralkl/grid.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

/// Stable transfer function W(z) = H (zI - F)^{-1} G + D with no zeros on the
/// unit circle; order zero (empty F) represents a constant.
class SpectralFactor {
 public:
  /// validation_points controls the density of the nonvanishing scan on the
  /// circle; callers that have already certified |W| > 0 may pass fewer.
  SpectralFactor(Matrix f, Vector g, RowVector h, Cplx d, int validation_points = 512);

  static SpectralFactor constant(Cplx d);

  /// Minimum-phase factor of the rational density
  ///   num(theta) / den(theta),  p(theta) = c_0 + sum_k c_k (z^k + z^-k),
  /// obtained by rooting the associated polynomials and keeping the roots
  /// inside the closed unit disc (denominator roots must be strictly inside).
  static SpectralFactor from_rational(std::span<const double> num,
                                      std::span<const double> den);

  int order() const noexcept { return static_cast<int>(f_.rows()); }
  const Matrix& f() const noexcept { return f_; }
  const Vector& g() const noexcept { return g_; }
  const RowVector& h() const noexcept { return h_; }
  Cplx d() const noexcept { return d_; }

  Cplx evaluate(Cplx z) const;

  /// Factor with W scaled by a positive constant.
  SpectralFactor scaled(double c) const;

 private:
  Matrix f_;
  Vector g_;
  RowVector h_;
  Cplx d_;
};

/// Spectral density Psi = |W(e^{j theta})|^2 of a spectral factor; positive
/// on the validation grid by construction.
class SpectralDensity {
 public:
  explicit SpectralDensity(SpectralFactor factor, int validation_grid = 512,
                           double positivity_floor = 1e-10);

  const SpectralFactor& factor() const noexcept { return factor_; }

  double evaluate(double theta) const;
  std::vector<double> evaluate(const UnitCircleGrid& grid) const;

  /// Integral of Psi over the circle, grid-doubled to rel_tol.
  double zeroth_moment(const QuadratureOptions& opts = {}) const;

 private:
  SpectralFactor factor_;
};

/// Scales the factor so that the zeroth moment equals alpha.
SpectralDensity normalize_zeroth_moment(const SpectralDensity& psi, double alpha,
                                        const QuadratureOptions& opts = {});

/// S(Psi || Phi) = integral of Psi log(Psi/Phi) by trapezoidal quadrature on
/// the given grid; phi_values are the samples of Phi on that grid.
double kl_divergence(const SpectralDensity& psi, std::span<const double> phi_values,
                     const UnitCircleGrid& grid);
double kl_divergence(std::span<const double> psi_values, std::span<const double> phi_values);

}  // namespace spectralkl
