#include "spectralkl/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <unsupported/Eigen/KroneckerProduct>

namespace spectralkl {

double spectral_radius(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix solve_discrete_lyapunov(const Matrix& f, const Matrix& q) {
  const Eigen::Index d = f.rows();
  if (f.cols() != d || q.rows() != d || q.cols() != d) {
    throw DimensionMismatch("lyapunov: dimension mismatch");
  }
  if (d == 0) return Matrix(0, 0);
  const double rho = spectral_radius(f);
  if (rho >= 1.0) {
    throw LyapunovSolveFailure("lyapunov: coefficient matrix is not stable");
  }

  if (d <= 40) {
    // vec(F X F*) = (conj(F) kron F) vec(X)
    const Matrix kron = Eigen::kroneckerProduct(f.conjugate(), f);
    const Matrix lhs = Matrix::Identity(d * d, d * d) - kron;
    Eigen::PartialPivLU<Matrix> lu(lhs);
    const Vector rhs = q.reshaped();
    const Vector x = lu.solve(rhs);
    if (!x.allFinite()) throw LyapunovSolveFailure("lyapunov: linear solve failed");
    Matrix result = x.reshaped(d, d);
    return 0.5 * (result + result.adjoint().eval());
  }

  // Doubling: X = sum_k F^k Q (F*)^k, with the power doubled each step.
  Matrix x = q;
  Matrix fk = f;
  for (int iter = 0; iter < 200; ++iter) {
    const Matrix increment = fk * x * fk.adjoint();
    x += increment;
    if (increment.norm() <= 1e-16 * x.norm()) {
      return 0.5 * (x + x.adjoint().eval());
    }
    fk = fk * fk;
  }
  throw LyapunovSolveFailure("lyapunov: doubling iteration did not converge");
}

}  // namespace spectralkl
