#include "spectralkl/moment_engine.hpp"

#include <cmath>
#include <vector>

#include "spectralkl/log.hpp"
#include "spectralkl/lyapunov.hpp"

namespace spectralkl {

AugmentedRealization augment_realization(const FilterBank& fb, const SpectralFactor& w_psi,
                                         const FactorizationResult& fr) {
  const int n = fb.dim();
  const int m = w_psi.order();
  const double inv_root_b = 1.0 / std::sqrt(fr.b_scalar);

  AugmentedRealization aug;
  aug.prior_order = m;
  aug.state_dim = m + n;
  aug.f_hat = Matrix::Zero(m + n, m + n);
  aug.f_hat.topLeftCorner(m, m) = w_psi.f();
  aug.f_hat.block(m, 0, n, m) = fb.b() * (inv_root_b * w_psi.h());
  aug.f_hat.block(m, m, n, n) = fr.z;
  aug.g_hat = Vector::Zero(m + n);
  aug.g_hat.head(m) = w_psi.g();
  aug.g_hat.tail(n) = fb.b() * (inv_root_b * w_psi.d());
  return aug;
}

HermitianMatrix moment_integral_lyapunov(const FilterBank& fb, const SpectralDensity& psi,
                                         const FactorizationResult& fr) {
  const AugmentedRealization aug = augment_realization(fb, psi.factor(), fr);
  Matrix xi;
  try {
    xi = solve_discrete_lyapunov(aug.f_hat, aug.g_hat * aug.g_hat.adjoint());
  } catch (const LyapunovSolveFailure&) {
    throw LyapunovSolveFailure("moment integral: cascade covariance solve failed");
  }
  const int n = fb.dim();
  const Matrix block = xi.bottomRightCorner(n, n);
  return HermitianMatrix(0.5 * (block + block.adjoint().eval()));
}

HermitianMatrix moment_integral_lyapunov(const FilterBank& fb, const SpectralDensity& psi,
                                         const HermitianMatrix& lambda,
                                         const DareOptions& dare_opts) {
  return moment_integral_lyapunov(fb, psi, solve_dare(fb, lambda, dare_opts));
}

HermitianMatrix moment_integral_quadrature(const FilterBank& fb, const SpectralDensity& psi,
                                           const HermitianMatrix& lambda,
                                           const QuadratureOptions& opts,
                                           double spectrum_floor) {
  const auto integrand = [&](double theta) -> Matrix {
    const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
    const double glg = (g.adjoint() * lambda.mat() * g).value().real();
    if (glg <= spectrum_floor) {
      throw SpectrumNotPositive("moment integral: G* Lambda G not positive on the grid");
    }
    return (psi.evaluate(theta) / glg) * (g * g.adjoint());
  };
  const auto result = adaptive_circle_integral_matrix(integrand, opts);
  return HermitianMatrix(0.5 * (result.value + result.value.adjoint().eval()));
}

HermitianMatrix theta_unnormalized(const FilterBank& fb, const SpectralDensity& psi,
                                   const HermitianMatrix& lambda, const ThetaOptions& opts) {
  HermitianMatrix integral = HermitianMatrix::zero(fb.dim());
  try {
    integral = moment_integral_lyapunov(fb, psi, lambda, opts.dare);
  } catch (const SpectrumNotPositive&) {
    throw;
  } catch (const Error& e) {
    if (!opts.quadrature_fallback) throw;
    log_info(std::string("theta: covariance route failed (") + e.what() +
             "); falling back to quadrature");
    integral = moment_integral_quadrature(fb, psi, lambda, opts.dare.scan,
                                          opts.dare.spectrum_floor);
  }
  const HermitianMatrix root = principal_sqrt(lambda);
  const Matrix image = root.mat() * integral.mat() * root.mat();
  HermitianMatrix result(0.5 * (image + image.adjoint().eval()));
  return clamp_tiny_negative_eigenvalues(result, opts.clamp);
}

DensityMatrix theta(const FilterBank& fb, const SpectralDensity& psi,
                    const DensityMatrix& lambda, const ThetaOptions& opts) {
  HermitianMatrix result = theta_unnormalized(fb, psi, lambda.hermitian(), opts);
  const int rank_in = numerical_rank(lambda.hermitian());
  const int rank_out = numerical_rank(result);
  if (rank_in != rank_out) {
    log_debug("theta: numerical rank moved from " + std::to_string(rank_in) + " to " +
              std::to_string(rank_out));
  }
  return DensityMatrix(std::move(result), opts.trace_tol);
}

double dual_value(const FilterBank& fb, const SpectralDensity& psi,
                  const HermitianMatrix& lambda, const QuadratureOptions& opts,
                  double spectrum_floor) {
  const auto integrand = [&](double theta) {
    const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
    const double glg = (g.adjoint() * lambda.mat() * g).value().real();
    if (glg <= spectrum_floor) {
      throw SpectrumNotPositive("dual value: G* Lambda G not positive on the grid");
    }
    return psi.evaluate(theta) * std::log(glg);
  };
  return -adaptive_circle_integral(integrand, opts).value + lambda.trace();
}

double dual_directional_derivative(const FilterBank& fb, const SpectralDensity& psi,
                                   const HermitianMatrix& lambda, const HermitianMatrix& x,
                                   const QuadratureOptions& opts, double spectrum_floor) {
  const auto integrand = [&](double theta) {
    const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
    const double glg = (g.adjoint() * lambda.mat() * g).value().real();
    if (glg <= spectrum_floor) {
      throw SpectrumNotPositive("dual derivative: G* Lambda G not positive on the grid");
    }
    const double gxg = (g.adjoint() * x.mat() * g).value().real();
    return psi.evaluate(theta) * gxg / glg;
  };
  return -adaptive_circle_integral(integrand, opts).value + x.trace();
}

double constraint_residual(const FilterBank& fb, const SpectralDensity& psi,
                           const HermitianMatrix& lambda, const DareOptions& dare_opts) {
  const HermitianMatrix integral = moment_integral_lyapunov(fb, psi, lambda, dare_opts);
  return (integral.mat() - Matrix::Identity(fb.dim(), fb.dim())).norm();
}

}  // namespace spectralkl
