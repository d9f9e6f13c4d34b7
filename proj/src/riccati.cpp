#include "spectralkl/riccati.hpp"

#include <Eigen/LU>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "spectralkl/log.hpp"
#include "spectralkl/lyapunov.hpp"

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace spectralkl {

namespace {

lapack_logical select_inside_unit_disc(const lapack_complex_double* alpha,
                                       const lapack_complex_double* beta) {
  return std::abs(*alpha) < std::abs(*beta) ? 1 : 0;
}

double dare_residual_norm(const Matrix& a, const Vector& b, const Matrix& lambda,
                          const Matrix& p) {
  const Cplx bpb = (b.adjoint() * p * b).value();
  const RowVector bpa = b.adjoint() * p * a;
  const Matrix rhs = a.adjoint() * p * a - bpa.adjoint() * (bpa / bpb) + lambda;
  return (p - rhs).norm() / std::max(1.0, p.norm());
}

struct CandidateSolution {
  Matrix p;
  bool ok = false;
  std::string failure;
};

// Stable deflating subspace of the pencil
//   z [ I  0  0 ]   [  A  0  B ]
//     [ 0  A* 0 ] - [ -Q  I  0 ]
//     [ 0 -B* 0 ]   [  0  0  0 ]
// via the sorted generalized Schur form; P = X2 X1^{-1} on the leading
// n columns of the right Schur vectors.
CandidateSolution dare_via_generalized_schur(const Matrix& a, const Vector& b,
                                             const Matrix& lambda) {
  const int n = static_cast<int>(a.rows());
  const int dim = 2 * n + 1;

  Matrix left = Matrix::Zero(dim, dim);
  left.topLeftCorner(n, n) = a;
  left.block(0, 2 * n, n, 1) = b;
  left.block(n, 0, n, n) = -lambda;
  left.block(n, n, n, n) = Matrix::Identity(n, n);

  Matrix right = Matrix::Zero(dim, dim);
  right.topLeftCorner(n, n) = Matrix::Identity(n, n);
  right.block(n, n, n, n) = a.adjoint();
  right.block(2 * n, n, 1, n) = -b.adjoint();

  Vector alpha(dim), beta(dim);
  Matrix vsr(dim, dim);
  lapack_int sdim = 0;
  Matrix vsl(1, 1);  // not referenced with jobvsl = 'N'
  const lapack_int info = LAPACKE_zgges(
      LAPACK_COL_MAJOR, 'N', 'V', 'S', select_inside_unit_disc, dim,
      reinterpret_cast<lapack_complex_double*>(left.data()), dim,
      reinterpret_cast<lapack_complex_double*>(right.data()), dim, &sdim,
      reinterpret_cast<lapack_complex_double*>(alpha.data()),
      reinterpret_cast<lapack_complex_double*>(beta.data()),
      reinterpret_cast<lapack_complex_double*>(vsl.data()), 1,
      reinterpret_cast<lapack_complex_double*>(vsr.data()), dim);

  CandidateSolution candidate;
  if (info != 0) {
    std::ostringstream oss;
    oss << "generalized Schur decomposition failed (info " << info << ")";
    candidate.failure = oss.str();
    return candidate;
  }
  if (sdim != n) {
    std::ostringstream oss;
    oss << "stable deflating subspace has dimension " << sdim << ", expected " << n;
    candidate.failure = oss.str();
    return candidate;
  }

  const Matrix x1 = vsr.block(0, 0, n, n);
  const Matrix x2 = vsr.block(n, 0, n, n);
  Eigen::FullPivLU<Matrix> lu(x1);
  if (!lu.isInvertible()) {
    candidate.failure = "leading subspace block is singular";
    return candidate;
  }
  Matrix p = x2 * lu.inverse();
  p = 0.5 * (p + p.adjoint().eval());
  candidate.p = std::move(p);
  candidate.ok = true;
  return candidate;
}

// Riccati difference recursion from Pi_0 = Lambda; dependency-free fallback,
// accepted only when it settles and the closed loop is stable.
CandidateSolution dare_via_recursion(const Matrix& a, const Vector& b, const Matrix& lambda,
                                     const DareOptions& opts) {
  CandidateSolution candidate;
  Matrix pi = lambda;
  for (int iter = 0; iter < opts.recursion_max_iters; ++iter) {
    const Cplx bpb = (b.adjoint() * pi * b).value();
    if (std::abs(bpb) <= 1e-14) {
      candidate.failure = "recursion hit a singular B* Pi B";
      return candidate;
    }
    const RowVector bpa = b.adjoint() * pi * a;
    Matrix next = a.adjoint() * pi * a - bpa.adjoint() * (bpa / bpb) + lambda;
    next = 0.5 * (next + next.adjoint().eval());
    const double gap = (next - pi).norm();
    pi = std::move(next);
    if (gap < opts.recursion_tol * std::max(1.0, pi.norm())) {
      candidate.p = pi;
      candidate.ok = true;
      return candidate;
    }
  }
  candidate.failure = "recursion did not settle";
  return candidate;
}

}  // namespace

double min_spectrum_value(const FilterBank& fb, const HermitianMatrix& lambda,
                          const QuadratureOptions& opts) {
  if (lambda.dim() != fb.dim()) throw DimensionMismatch("min_spectrum_value: dimensions");
  return adaptive_circle_min(
             [&](double theta) {
               const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
               return (g.adjoint() * lambda.mat() * g).value().real();
             },
             opts)
      .value;
}

FactorizationResult solve_dare(const FilterBank& fb, const HermitianMatrix& lambda,
                               const DareOptions& opts) {
  const int n = fb.dim();
  if (lambda.dim() != n) throw DimensionMismatch("solve_dare: dimension mismatch");

  const double min_spectrum = opts.known_min_spectrum >= 0.0
                                  ? opts.known_min_spectrum
                                  : min_spectrum_value(fb, lambda, opts.scan);
  if (min_spectrum <= opts.spectrum_floor) {
    std::ostringstream oss;
    oss << "G* Lambda G reaches " << min_spectrum
        << " on the circle; no spectral factorization";
    throw SpectrumNotPositive(oss.str());
  }

  const auto finish = [&](const Matrix& p_raw,
                          bool used_recursion) -> FactorizationResult {
    const Matrix p = 0.5 * (p_raw + p_raw.adjoint().eval());
    const Cplx bpb = (fb.b().adjoint() * p * fb.b()).value();
    if (!(bpb.real() > 1e-14)) {
      throw NoStabilizingSolution("solve_dare: B* P B is not positive");
    }
    const double b_scalar = bpb.real();
    const RowVector bpa = fb.b().adjoint() * p * fb.a();
    const Matrix z = fb.a() - fb.b() * (bpa / b_scalar);
    const double rho_z = spectral_radius(z);
    if (rho_z >= 1.0) {
      std::ostringstream oss;
      oss << "solve_dare: closed loop not stable (spectral radius " << rho_z << ")";
      throw NoStabilizingSolution(oss.str());
    }
    const double residual = dare_residual_norm(fb.a(), fb.b(), lambda.mat(), p);
    if (residual > opts.residual_tol) {
      std::ostringstream oss;
      oss << "solve_dare: residual " << residual << " above tolerance";
      throw NoStabilizingSolution(oss.str());
    }
    const double root_b = std::sqrt(b_scalar);
    // A cheap scan suffices here: the adaptive pre-scan has already certified
    // that |W|^2 = G* Lambda G stays above the floor.
    SpectralFactor w(fb.a(), fb.b(), bpa / root_b, Cplx(root_b, 0.0), 64);
    return FactorizationResult{HermitianMatrix(p),       z,     b_scalar,
                               std::move(w),             residual, rho_z,
                               min_spectrum,             used_recursion};
  };

  std::string first_failure;
  if (opts.prefer_recursion) {
    CandidateSolution recursion = dare_via_recursion(fb.a(), fb.b(), lambda.mat(), opts);
    if (recursion.ok) {
      try {
        return finish(recursion.p, true);
      } catch (const NoStabilizingSolution& e) {
        first_failure = e.what();
      }
    } else {
      first_failure = recursion.failure;
    }
  }

  CandidateSolution schur = dare_via_generalized_schur(fb.a(), fb.b(), lambda.mat());
  if (schur.ok) {
    try {
      return finish(schur.p, false);
    } catch (const NoStabilizingSolution& e) {
      log_info(std::string("subspace DARE candidate rejected: ") + e.what());
      schur.failure = e.what();
    }
  } else {
    log_info("subspace DARE solve failed: " + schur.failure);
  }

  if (!opts.prefer_recursion) {
    CandidateSolution recursion = dare_via_recursion(fb.a(), fb.b(), lambda.mat(), opts);
    if (recursion.ok) {
      return finish(recursion.p, true);
    }
    first_failure = recursion.failure;
  }
  throw NoStabilizingSolution("solve_dare: subspace method failed (" + schur.failure +
                              "); recursion failed (" + first_failure + ")");
}

double verify_popov_identity(const FilterBank& fb, const HermitianMatrix& pi,
                             const UnitCircleGrid& grid) {
  const int n = fb.dim();
  if (pi.dim() != n) throw DimensionMismatch("popov identity: dimension mismatch");
  Matrix block(n + 1, n + 1);
  block.topLeftCorner(n, n) = fb.a().adjoint() * pi.mat() * fb.a() - pi.mat();
  block.topRightCorner(n, 1) = fb.a().adjoint() * pi.mat() * fb.b();
  block.bottomLeftCorner(1, n) = fb.b().adjoint() * pi.mat() * fb.a();
  block(n, n) = (fb.b().adjoint() * pi.mat() * fb.b()).value();

  double worst = 0.0;
  Vector stacked(n + 1);
  for (int k = 0; k < grid.size; ++k) {
    stacked.head(n) = fb.evaluate(grid.point(k));
    stacked(n) = 1.0;
    const Cplx value = (stacked.adjoint() * block * stacked).value();
    worst = std::max(worst, std::abs(value));
  }
  return worst;
}

SpectralFactor factor_inverse(const FilterBank& fb, const FactorizationResult& fr) {
  const double root_b = std::sqrt(fr.b_scalar);
  const RowVector bpa = fb.b().adjoint() * fr.p.mat() * fb.a();
  return SpectralFactor(fr.z, fb.b(), -bpa / (fr.b_scalar * root_b), Cplx(1.0 / root_b, 0.0),
                        64);
}

Vector construct_c_vector(const FilterBank& fb, const FactorizationResult& fr) {
  return (fr.p.mat() * fb.b()) / std::sqrt(fr.b_scalar);
}

}  // namespace spectralkl
