#include "spectralkl/spectral_density.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "spectralkl/log.hpp"
#include "spectralkl/lyapunov.hpp"

namespace spectralkl {

namespace {

// Roots of a complex polynomial sum_k coeffs[k] z^k via the companion matrix.
std::vector<Cplx> polynomial_roots(std::vector<Cplx> coeffs) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree < 1) return {};
  Matrix companion = Matrix::Zero(degree, degree);
  for (int i = 0; i < degree; ++i) {
    companion(0, i) = -coeffs[static_cast<size_t>(degree - 1 - i)] / coeffs.back();
  }
  companion.block(1, 0, degree - 1, degree - 1).diagonal().setOnes();
  Eigen::ComplexEigenSolver<Matrix> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw Error("root finding failed");
  std::vector<Cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + degree);
  return roots;
}

// Monic polynomial with the given roots, highest power last.
std::vector<Cplx> polynomial_from_roots(std::span<const Cplx> roots) {
  std::vector<Cplx> coeffs{Cplx(1.0, 0.0)};
  for (const Cplx& root : roots) {
    std::vector<Cplx> next(coeffs.size() + 1, Cplx(0.0, 0.0));
    for (size_t i = 0; i < coeffs.size(); ++i) {
      next[i + 1] += coeffs[i];
      next[i] -= coeffs[i] * root;
    }
    coeffs = std::move(next);
  }
  return coeffs;
}

Cplx evaluate_polynomial(std::span<const Cplx> coeffs, Cplx z) {
  Cplx value(0.0, 0.0);
  for (size_t i = coeffs.size(); i-- > 0;) {
    value = value * z + coeffs[i];
  }
  return value;
}

double evaluate_symmetric_laurent(std::span<const double> c, double theta) {
  double value = c.empty() ? 0.0 : c[0];
  for (size_t k = 1; k < c.size(); ++k) {
    value += 2.0 * c[k] * std::cos(static_cast<double>(k) * theta);
  }
  return value;
}

struct HalfFactor {
  std::vector<Cplx> coeffs;  // monic, highest power last
  double scale = 1.0;        // |factor|^2 = scale * |monic|^2 on the circle
};

// Factorization of the symmetric Laurent polynomial
//   p(theta) = c_0 + sum_k c_k (z^k + z^-k) = scale * |q(e^{j theta})|^2
// with q monic and all roots inside the closed unit disc.
HalfFactor factor_symmetric_laurent(std::span<const double> c, const char* label) {
  std::vector<double> trimmed(c.begin(), c.end());
  while (trimmed.size() > 1 && trimmed.back() == 0.0) trimmed.pop_back();
  if (trimmed.empty()) throw InvalidPrior(std::string(label) + ": empty coefficient list");

  const size_t p = trimmed.size() - 1;
  if (p == 0) {
    if (!(trimmed[0] > 0.0)) {
      throw InvalidPrior(std::string(label) + ": constant term must be positive");
    }
    return {{Cplx(1.0, 0.0)}, trimmed[0]};
  }

  // z^p p(z) has the 2p roots in reciprocal-conjugate pairs; the p of
  // smallest modulus form the stable half.
  std::vector<Cplx> poly(2 * p + 1);
  for (size_t j = 0; j <= 2 * p; ++j) {
    const size_t k = j >= p ? j - p : p - j;
    poly[j] = Cplx(trimmed[k], 0.0);
  }
  std::vector<Cplx> roots = polynomial_roots(poly);
  std::sort(roots.begin(), roots.end(), [](const Cplx& a, const Cplx& b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return std::arg(a) < std::arg(b);
  });
  roots.resize(p);

  HalfFactor half;
  half.coeffs = polynomial_from_roots(roots);

  // Calibrate the scale where |q| is largest to stay away from near-zeros.
  double best_q = -1.0;
  double best_p = 0.0;
  for (int k = 0; k < 128; ++k) {
    const double theta = 2.0 * kPi * k / 128;
    const Cplx z(std::cos(theta), std::sin(theta));
    const double q_sq = std::norm(evaluate_polynomial(half.coeffs, z));
    if (q_sq > best_q) {
      best_q = q_sq;
      best_p = evaluate_symmetric_laurent(trimmed, theta);
    }
  }
  if (!(best_p > 0.0) || !(best_q > 0.0)) {
    throw InvalidPrior(std::string(label) + ": not positive on the unit circle");
  }
  half.scale = best_p / best_q;

  // The factorization must reproduce the input; a mismatch means the input
  // touches zero on the circle (or is not sign-definite).
  for (int k = 0; k < 64; ++k) {
    const double theta = 2.0 * kPi * (k + 0.37) / 64;
    const Cplx z(std::cos(theta), std::sin(theta));
    const double lhs = evaluate_symmetric_laurent(trimmed, theta);
    const double rhs = half.scale * std::norm(evaluate_polynomial(half.coeffs, z));
    if (std::abs(lhs - rhs) > 1e-6 * std::max(1.0, std::abs(lhs))) {
      throw InvalidPrior(std::string(label) +
                         ": spectral factorization failed; the polynomial may vanish or "
                         "change sign on the circle");
    }
  }
  return half;
}

}  // namespace

SpectralFactor::SpectralFactor(Matrix f, Vector g, RowVector h, Cplx d,
                               int validation_points)
    : f_(std::move(f)), g_(std::move(g)), h_(std::move(h)), d_(d) {
  const int m = static_cast<int>(f_.rows());
  if (f_.cols() != m || g_.size() != m || h_.size() != m) {
    throw DimensionMismatch("spectral factor: inconsistent state-space dimensions");
  }
  if (m > 0) {
    const double rho = spectral_radius(f_);
    if (rho >= 1.0) {
      std::ostringstream oss;
      oss << "spectral factor: F is not stable (spectral radius " << rho << ")";
      throw InvalidPrior(oss.str());
    }
    if (std::abs(d_) > 1e-14) {
      const Matrix zero_dynamics = f_ - g_ * (h_ / d_);
      const double zero_radius = spectral_radius(zero_dynamics);
      if (zero_radius > 1.0 + 1e-8) {
        std::ostringstream oss;
        oss << "spectral factor: zero of modulus " << zero_radius
            << " outside the closed unit disc";
        throw InvalidPrior(oss.str());
      }
    }
  }
  // The factor must not vanish on the circle.
  for (int k = 0; k < validation_points; ++k) {
    const double theta = 2.0 * kPi * k / validation_points;
    if (std::abs(evaluate(Cplx(std::cos(theta), std::sin(theta)))) <= 1e-10) {
      throw InvalidPrior("spectral factor: vanishes on the unit circle");
    }
  }
}

SpectralFactor SpectralFactor::constant(Cplx d) {
  return SpectralFactor(Matrix(0, 0), Vector(0), RowVector(0), d);
}

Cplx SpectralFactor::evaluate(Cplx z) const {
  const int m = order();
  if (m == 0) return d_;
  const Matrix shifted = z * Matrix::Identity(m, m) - f_;
  const Vector x = Eigen::PartialPivLU<Matrix>(shifted).solve(g_);
  if (!x.allFinite()) throw EvaluationSingular("spectral factor: evaluation hits a pole");
  return (h_ * x).value() + d_;
}

SpectralFactor SpectralFactor::scaled(double c) const {
  return SpectralFactor(f_, g_, c * h_, c * d_);
}

SpectralFactor SpectralFactor::from_rational(std::span<const double> num,
                                             std::span<const double> den) {
  const HalfFactor top = factor_symmetric_laurent(num, "prior numerator");
  const HalfFactor bottom = factor_symmetric_laurent(den, "prior denominator");

  // Denominator roots must stay strictly inside the disc (poles of W).
  {
    std::vector<Cplx> roots = polynomial_roots(bottom.coeffs);
    for (const Cplx& r : roots) {
      if (std::abs(r) >= 1.0 - 1e-9) {
        throw InvalidPrior("prior denominator: root too close to the unit circle");
      }
    }
  }

  const double gain = std::sqrt(top.scale / bottom.scale);
  const size_t p = top.coeffs.size() - 1;
  const size_t q = bottom.coeffs.size() - 1;

  // Pad the denominator with poles at the origin to make W proper; modulus on
  // the circle is unchanged.
  std::vector<Cplx> den_coeffs = bottom.coeffs;
  if (p > q) {
    den_coeffs.insert(den_coeffs.begin(), p - q, Cplx(0.0, 0.0));
  }
  const size_t m = den_coeffs.size() - 1;

  std::vector<Cplx> num_coeffs(m + 1, Cplx(0.0, 0.0));
  for (size_t i = 0; i < top.coeffs.size(); ++i) {
    num_coeffs[i] = gain * top.coeffs[i];
  }

  if (m == 0) return SpectralFactor::constant(num_coeffs[0]);

  // Controllable companion realization of num/den (den monic, degree m).
  const Cplx d_term = num_coeffs[m];
  Matrix f = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (size_t i = 0; i < m; ++i) {
    f(0, static_cast<Eigen::Index>(i)) = -den_coeffs[m - 1 - i];
  }
  if (m > 1) {
    f.block(1, 0, static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(m - 1))
        .diagonal()
        .setOnes();
  }
  Vector g = Vector::Zero(static_cast<Eigen::Index>(m));
  g(0) = 1.0;
  RowVector h(static_cast<Eigen::Index>(m));
  for (size_t i = 1; i <= m; ++i) {
    h(static_cast<Eigen::Index>(i - 1)) = num_coeffs[m - i] - d_term * den_coeffs[m - i];
  }
  return SpectralFactor(std::move(f), std::move(g), std::move(h), d_term);
}

SpectralDensity::SpectralDensity(SpectralFactor factor, int validation_grid,
                                 double positivity_floor)
    : factor_(std::move(factor)) {
  const UnitCircleGrid grid = UnitCircleGrid::uniform(validation_grid);
  for (int k = 0; k < grid.size; ++k) {
    const double value = std::norm(factor_.evaluate(grid.point(k)));
    if (!(value > positivity_floor)) {
      std::ostringstream oss;
      oss << "spectral density: value " << value << " at theta = " << grid.angle(k)
          << " is not positive";
      throw NonPositiveSpectrum(oss.str());
    }
  }
}

double SpectralDensity::evaluate(double theta) const {
  return std::norm(factor_.evaluate(Cplx(std::cos(theta), std::sin(theta))));
}

std::vector<double> SpectralDensity::evaluate(const UnitCircleGrid& grid) const {
  std::vector<double> values;
  values.reserve(static_cast<size_t>(grid.size));
  for (int k = 0; k < grid.size; ++k) {
    values.push_back(std::norm(factor_.evaluate(grid.point(k))));
  }
  return values;
}

double SpectralDensity::zeroth_moment(const QuadratureOptions& opts) const {
  const auto result =
      adaptive_circle_integral([this](double theta) { return evaluate(theta); }, opts);
  if (!result.converged) {
    warn("zeroth moment: quadrature hit the grid cap before settling");
  }
  return result.value;
}

SpectralDensity normalize_zeroth_moment(const SpectralDensity& psi, double alpha,
                                        const QuadratureOptions& opts) {
  if (!(alpha > 0.0)) throw Error("normalize_zeroth_moment: alpha must be positive");
  const double moment = psi.zeroth_moment(opts);
  return SpectralDensity(psi.factor().scaled(std::sqrt(alpha / moment)));
}

double kl_divergence(std::span<const double> psi_values, std::span<const double> phi_values) {
  if (psi_values.size() != phi_values.size() || psi_values.empty()) {
    throw DimensionMismatch("kl_divergence: sample lengths differ");
  }
  std::vector<double> integrand(psi_values.size());
  for (size_t k = 0; k < psi_values.size(); ++k) {
    if (!(psi_values[k] > 0.0) || !(phi_values[k] > 0.0)) {
      throw NonPositiveSpectrum("kl_divergence: spectra must be positive on the grid");
    }
    integrand[k] = psi_values[k] * std::log(psi_values[k] / phi_values[k]);
  }
  return circle_quadrature(integrand);
}

double kl_divergence(const SpectralDensity& psi, std::span<const double> phi_values,
                     const UnitCircleGrid& grid) {
  if (static_cast<int>(phi_values.size()) != grid.size) {
    throw DimensionMismatch("kl_divergence: grid and sample sizes differ");
  }
  const std::vector<double> psi_values = psi.evaluate(grid);
  return kl_divergence(psi_values, phi_values);
}

}  // namespace spectralkl
