#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spectralkl/errors.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

/// Uniform grid theta_k = 2 pi k / N on the unit circle, k = 0..N-1.
struct UnitCircleGrid {
  int size = 0;

  static UnitCircleGrid uniform(int n);

  double angle(int k) const { return 2.0 * kPi * static_cast<double>(k) / size; }
  Cplx point(int k) const {
    const double t = angle(k);
    return Cplx(std::cos(t), std::sin(t));
  }
};

struct QuadratureOptions {
  int initial_points = 512;
  int max_points = 65536;
  double rel_tol = 1e-10;
};

/// Pairwise (cascade) summation; deterministic and well conditioned.
double pairwise_sum(std::span<const double> values);
Cplx pairwise_sum(std::span<const Cplx> values);
Matrix pairwise_sum(const std::vector<Matrix>& values);

/// Mean of the samples = trapezoidal quadrature of a periodic function over
/// the circle with normalized Lebesgue measure.
double circle_quadrature(std::span<const double> samples);
Matrix circle_quadrature(const std::vector<Matrix>& samples);

template <class T>
struct AdaptiveResult {
  T value{};
  int points = 0;
  bool converged = false;
};

/// Integrates theta -> f(theta) over the circle (normalized measure) on a
/// uniform grid, doubling the grid until the value moves by less than
/// rel_tol in relative terms, starting from initial_points and capped at
/// max_points.
AdaptiveResult<double> adaptive_circle_integral(const std::function<double(double)>& f,
                                                const QuadratureOptions& opts = {});
AdaptiveResult<Matrix> adaptive_circle_integral_matrix(
    const std::function<Matrix(double)>& f, const QuadratureOptions& opts = {});

/// Minimum of theta -> f(theta), grid-doubled until the minimum stabilizes.
AdaptiveResult<double> adaptive_circle_min(const std::function<double(double)>& f,
                                           const QuadratureOptions& opts = {});
AdaptiveResult<double> adaptive_circle_max(const std::function<double(double)>& f,
                                           const QuadratureOptions& opts = {});

}  // namespace spectralkl
