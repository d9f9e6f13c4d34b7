#include "spectralkl/hermitian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace spectralkl {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success) {
    throw Error("Hermitian eigendecomposition failed");
  }
  return es;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Matrix& raw, double rel_tol) {
  if (raw.rows() != raw.cols()) {
    throw DimensionMismatch("Hermitian matrix must be square");
  }
  const Matrix sym = 0.5 * (raw + raw.adjoint());
  const double deviation = (raw - sym).norm();
  const double scale = raw.norm();
  if (deviation > rel_tol * scale && deviation > 0.0) {
    std::ostringstream oss;
    oss << "matrix is not Hermitian: relative deviation "
        << (scale > 0.0 ? deviation / scale : deviation);
    throw NotHermitian(oss.str());
  }
  m_ = sym;
}

RealVector HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error("Hermitian eigendecomposition failed");
  }
  return es.eigenvalues();
}

double HermitianMatrix::min_eigenvalue() const { return eigenvalues().minCoeff(); }

double HermitianMatrix::max_eigenvalue() const { return eigenvalues().maxCoeff(); }

double inner(const HermitianMatrix& p, const HermitianMatrix& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("inner: dimension mismatch");
  return p.mat().cwiseProduct(q.mat().transpose()).sum().real();
}

DensityMatrix::DensityMatrix(HermitianMatrix base, double trace_tol, double psd_tol)
    : base_(std::move(base)) {
  const double tr = base_.trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    std::ostringstream oss;
    oss << "density matrix trace " << tr << " deviates from 1 by " << std::abs(tr - 1.0);
    throw NotDensityMatrix(oss.str());
  }
  const RealVector eigs = base_.eigenvalues();
  const double floor = -psd_tol * std::max(eigs.maxCoeff(), 0.0);
  if (eigs.minCoeff() < floor) {
    std::ostringstream oss;
    oss << "density matrix has eigenvalue " << eigs.minCoeff() << " below " << floor;
    throw NotDensityMatrix(oss.str());
  }
}

DensityMatrix DensityMatrix::uniform(int n) {
  return DensityMatrix(HermitianMatrix(Matrix::Identity(n, n) / static_cast<double>(n)));
}

HermitianBasis HermitianBasis::standard(int n) {
  if (n < 1) throw DimensionMismatch("basis dimension must be positive");
  std::vector<HermitianMatrix> elements;
  elements.reserve(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Matrix e = Matrix::Zero(n, n);
    e(i, i) = 1.0;
    elements.emplace_back(e);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Matrix sym = Matrix::Zero(n, n);
      sym(i, j) = inv_sqrt2;
      sym(j, i) = inv_sqrt2;
      elements.emplace_back(sym);
      Matrix skew = Matrix::Zero(n, n);
      skew(i, j) = Cplx(0.0, 1.0) * inv_sqrt2;
      skew(j, i) = Cplx(0.0, -1.0) * inv_sqrt2;
      elements.emplace_back(skew);
    }
  }
  return HermitianBasis(n, std::move(elements));
}

RealVector HermitianBasis::coordinates(const HermitianMatrix& m) const {
  if (m.dim() != n_) throw DimensionMismatch("coordinates: dimension mismatch");
  RealVector coords(size());
  for (int k = 0; k < size(); ++k) {
    coords(k) = inner(elements_[static_cast<size_t>(k)], m);
  }
  return coords;
}

HermitianMatrix HermitianBasis::from_coordinates(const RealVector& coords) const {
  if (coords.size() != size()) throw DimensionMismatch("from_coordinates: wrong length");
  Matrix acc = Matrix::Zero(n_, n_);
  for (int k = 0; k < size(); ++k) {
    acc += coords(k) * elements_[static_cast<size_t>(k)].mat();
  }
  return HermitianMatrix(acc);
}

HermitianMatrix principal_sqrt(const HermitianMatrix& m, double rel_tol) {
  const auto es = eigensolve(m);
  RealVector eigs = es.eigenvalues();
  const double threshold = rel_tol * std::max(eigs.maxCoeff(), 0.0);
  if (eigs.minCoeff() < -threshold) {
    std::ostringstream oss;
    oss << "matrix is not PSD: eigenvalue " << eigs.minCoeff() << " below " << -threshold;
    throw NotPositiveSemidefinite(oss.str());
  }
  for (int i = 0; i < eigs.size(); ++i) {
    eigs(i) = eigs(i) > 0.0 ? std::sqrt(eigs(i)) : 0.0;
  }
  const Matrix root =
      es.eigenvectors() * eigs.asDiagonal() * es.eigenvectors().adjoint();
  return HermitianMatrix(0.5 * (root + root.adjoint()));
}

HermitianMatrix sqrt_derivative(const HermitianMatrix& lambda, const HermitianMatrix& x,
                                double pd_rel_tol) {
  if (lambda.dim() != x.dim()) throw DimensionMismatch("sqrt_derivative: dimension mismatch");
  const auto es = eigensolve(lambda);
  const RealVector eigs = es.eigenvalues();
  if (eigs.minCoeff() <= pd_rel_tol * std::max(eigs.maxCoeff(), 0.0)) {
    throw SingularBase("sqrt_derivative requires a strictly positive definite base");
  }
  // In the eigenbasis the Lyapunov equation decouples entrywise:
  // D_ij = X_ij / (s_i + s_j) with s = sqrt(eigenvalues).
  const Matrix x_tilde = es.eigenvectors().adjoint() * x.mat() * es.eigenvectors();
  Matrix d_tilde(lambda.dim(), lambda.dim());
  for (int i = 0; i < lambda.dim(); ++i) {
    const double si = std::sqrt(eigs(i));
    for (int j = 0; j < lambda.dim(); ++j) {
      d_tilde(i, j) = x_tilde(i, j) / (si + std::sqrt(eigs(j)));
    }
  }
  const Matrix d = es.eigenvectors() * d_tilde * es.eigenvectors().adjoint();
  return HermitianMatrix(0.5 * (d + d.adjoint()));
}

HermitianMatrix clamp_tiny_negative_eigenvalues(const HermitianMatrix& m, double clamp_below) {
  const RealVector eigs_probe = m.eigenvalues();
  if (eigs_probe.minCoeff() >= 0.0) return m;
  const auto es = eigensolve(m);
  RealVector eigs = es.eigenvalues();
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs(i) < 0.0 && eigs(i) >= -clamp_below) eigs(i) = 0.0;
  }
  const Matrix rebuilt =
      es.eigenvectors() * eigs.asDiagonal() * es.eigenvectors().adjoint();
  return HermitianMatrix(0.5 * (rebuilt + rebuilt.adjoint()));
}

int numerical_rank(const HermitianMatrix& m, double rel_threshold) {
  const RealVector eigs = m.eigenvalues();
  const double scale = eigs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (std::abs(eigs(i)) > rel_threshold * scale) ++rank;
  }
  return rank;
}

}  // namespace spectralkl
