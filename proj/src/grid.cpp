#include "spectralkl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace spectralkl {

UnitCircleGrid UnitCircleGrid::uniform(int n) {
  if (n < 2) throw GridTooCoarse("unit-circle grid needs at least 2 points");
  return UnitCircleGrid{n};
}

namespace {

template <class T>
T pairwise_sum_impl(const T* data, size_t count) {
  if (count <= 16) {
    T acc = data[0];
    for (size_t i = 1; i < count; ++i) acc += data[i];
    return acc;
  }
  const size_t half = count / 2;
  T left = pairwise_sum_impl(data, half);
  T right = pairwise_sum_impl(data + half, count - half);
  left += right;
  return left;
}

template <class T, class Sampler>
AdaptiveResult<T> adapt(const Sampler& sample_mean, double rel_tol, int initial, int cap,
                        const std::function<double(const T&, const T&)>& gap) {
  int n = std::max(initial, 2);
  T previous = sample_mean(n);
  while (n < cap) {
    n *= 2;
    T current = sample_mean(n);
    if (gap(current, previous) <= rel_tol) {
      return {current, n, true};
    }
    previous = std::move(current);
  }
  return {previous, n, false};
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum_impl(values.data(), values.size());
}

Cplx pairwise_sum(std::span<const Cplx> values) {
  if (values.empty()) return Cplx(0.0, 0.0);
  return pairwise_sum_impl(values.data(), values.size());
}

Matrix pairwise_sum(const std::vector<Matrix>& values) {
  if (values.empty()) return Matrix();
  return pairwise_sum_impl(values.data(), values.size());
}

double circle_quadrature(std::span<const double> samples) {
  return pairwise_sum(samples) / static_cast<double>(samples.size());
}

Matrix circle_quadrature(const std::vector<Matrix>& samples) {
  return pairwise_sum(samples) / static_cast<double>(samples.size());
}

AdaptiveResult<double> adaptive_circle_integral(const std::function<double(double)>& f,
                                                const QuadratureOptions& opts) {
  const auto mean = [&f](int n) {
    std::vector<double> samples(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      samples[static_cast<size_t>(k)] = f(2.0 * kPi * k / n);
    }
    return circle_quadrature(samples);
  };
  const std::function<double(const double&, const double&)> gap =
      [](const double& current, const double& previous) {
        return std::abs(current - previous) / std::max(1.0, std::abs(current));
      };
  return adapt<double>(mean, opts.rel_tol, opts.initial_points, opts.max_points, gap);
}

AdaptiveResult<Matrix> adaptive_circle_integral_matrix(const std::function<Matrix(double)>& f,
                                                       const QuadratureOptions& opts) {
  const auto mean = [&f](int n) {
    std::vector<Matrix> samples;
    samples.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      samples.push_back(f(2.0 * kPi * k / n));
    }
    return circle_quadrature(samples);
  };
  const std::function<double(const Matrix&, const Matrix&)> gap =
      [](const Matrix& current, const Matrix& previous) {
        return (current - previous).norm() / std::max(1.0, current.norm());
      };
  return adapt<Matrix>(mean, opts.rel_tol, opts.initial_points, opts.max_points, gap);
}

namespace {

AdaptiveResult<double> adaptive_extremum(const std::function<double(double)>& f,
                                         const QuadratureOptions& opts, bool want_min) {
  const auto extremum = [&](int n) {
    double best = f(0.0);
    for (int k = 1; k < n; ++k) {
      const double value = f(2.0 * kPi * k / n);
      best = want_min ? std::min(best, value) : std::max(best, value);
    }
    return best;
  };
  // Extrema stabilize quickly for smooth integrands; 1e-6 relative is ample
  // for the positivity scans this backs.
  const double tol = std::max(opts.rel_tol, 1e-6);
  int n = std::max(opts.initial_points, 2);
  double previous = extremum(n);
  while (n < opts.max_points) {
    n *= 2;
    const double current = extremum(n);
    if (std::abs(current - previous) <= tol * std::max(1.0, std::abs(current))) {
      return {current, n, true};
    }
    previous = current;
  }
  return {previous, n, false};
}

}  // namespace

AdaptiveResult<double> adaptive_circle_min(const std::function<double(double)>& f,
                                           const QuadratureOptions& opts) {
  return adaptive_extremum(f, opts, true);
}

AdaptiveResult<double> adaptive_circle_max(const std::function<double(double)>& f,
                                           const QuadratureOptions& opts) {
  return adaptive_extremum(f, opts, false);
}

}  // namespace spectralkl
