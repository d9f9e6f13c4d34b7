#include <doctest.h>

#include <cmath>

#include "spectralkl/grid.hpp"

using namespace spectralkl;

TEST_CASE("grid construction and spacing") {
  CHECK_THROWS_AS(UnitCircleGrid::uniform(1), GridTooCoarse);
  const UnitCircleGrid grid = UnitCircleGrid::uniform(8);
  CHECK(grid.angle(0) == 0.0);
  CHECK(grid.angle(4) == doctest::Approx(kPi));
  CHECK(std::abs(grid.point(2) - Cplx(0.0, 1.0)) <= 1e-15);
}

TEST_CASE("pairwise sum agrees with sequential on benign data") {
  std::vector<double> values(1000);
  for (size_t i = 0; i < values.size(); ++i) values[i] = 1.0 / (1.0 + double(i));
  double sequential = 0.0;
  for (double v : values) sequential += v;
  CHECK(pairwise_sum(values) == doctest::Approx(sequential).epsilon(1e-14));
}

TEST_CASE("uniform trapezoid integrates low harmonics exactly") {
  // For |k| < N the rule is exact on e^{j k theta}: 1 at k = 0, else 0.
  const int n = 16;
  for (int k = -(n - 1); k < n; ++k) {
    std::vector<double> real_part(n), imag_part(n);
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * kPi * j / n;
      real_part[size_t(j)] = std::cos(k * theta);
      imag_part[size_t(j)] = std::sin(k * theta);
    }
    const double expected = k == 0 ? 1.0 : 0.0;
    CHECK(std::abs(circle_quadrature(real_part) - expected) <= 1e-14);
    CHECK(std::abs(circle_quadrature(imag_part)) <= 1e-14);
  }
}

TEST_CASE("adaptive integral converges under doubling") {
  const auto f = [](double theta) { return 1.25 + std::cos(theta); };
  const auto result = adaptive_circle_integral(f, {16, 4096, 1e-10});
  CHECK(result.converged);
  CHECK(result.value == doctest::Approx(1.25).epsilon(1e-12));

  // A smooth rational density: 1/|1 - 0.9 e^{-j theta}|^2 integrates to
  // 1/(1 - 0.81).
  const auto pole = [](double theta) {
    const Cplx denominator = 1.0 - 0.9 * Cplx(std::cos(theta), -std::sin(theta));
    return 1.0 / std::norm(denominator);
  };
  const auto pole_result = adaptive_circle_integral(pole, {64, 65536, 1e-10});
  CHECK(pole_result.converged);
  CHECK(pole_result.value == doctest::Approx(1.0 / 0.19).epsilon(1e-9));
}

TEST_CASE("adaptive matrix integral and extrema") {
  const auto f = [](double theta) {
    Matrix m(2, 2);
    m << std::cos(theta) * std::cos(theta), std::sin(theta), std::sin(theta), 1.0;
    return m;
  };
  const auto result = adaptive_circle_integral_matrix(f, {16, 4096, 1e-12});
  CHECK(result.converged);
  CHECK(std::abs(result.value(0, 0) - Cplx(0.5, 0.0)) <= 1e-12);
  CHECK(std::abs(result.value(0, 1)) <= 1e-12);
  CHECK(std::abs(result.value(1, 1) - Cplx(1.0, 0.0)) <= 1e-12);

  const auto g = [](double theta) { return 2.0 + std::sin(theta); };
  CHECK(adaptive_circle_min(g, {16, 8192, 1e-8}).value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(adaptive_circle_max(g, {16, 8192, 1e-8}).value == doctest::Approx(3.0).epsilon(1e-5));
}
