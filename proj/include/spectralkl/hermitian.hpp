#pragma once

#include <vector>

#include "spectralkl/errors.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

/// Hermitian matrix with symmetrization enforced at construction.
///
/// The stored matrix is (M + M*)/2; construction rejects inputs whose
/// anti-Hermitian part exceeds rel_tol * ||M||_F.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& raw, double rel_tol = 1e-12);

  static HermitianMatrix zero(int n) { return HermitianMatrix(Matrix::Zero(n, n)); }
  static HermitianMatrix identity(int n) { return HermitianMatrix(Matrix::Identity(n, n)); }

  const Matrix& mat() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  double trace() const { return m_.trace().real(); }
  double norm() const { return m_.norm(); }

  /// Eigenvalues in ascending order (real, since the matrix is Hermitian).
  RealVector eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;

 private:
  Matrix m_;
};

/// tr(PQ), real for Hermitian P and Q.
double inner(const HermitianMatrix& p, const HermitianMatrix& q);

/// Hermitian PSD matrix with unit trace.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix base, double trace_tol = 1e-12,
                         double psd_tol = 1e-10);

  /// I/n, the agnostic initial condition.
  static DensityMatrix uniform(int n);

  const HermitianMatrix& hermitian() const noexcept { return base_; }
  const Matrix& mat() const noexcept { return base_.mat(); }
  int dim() const noexcept { return base_.dim(); }

 private:
  HermitianMatrix base_;
};

/// Orthonormal basis of the real vector space of n x n Hermitian matrices
/// under <P,Q> = tr(PQ). Ordered as: E_ii for i < n, then (E_ij+E_ji)/sqrt(2)
/// and (iE_ij-iE_ji)/sqrt(2) for each pair i < j.
class HermitianBasis {
 public:
  static HermitianBasis standard(int n);

  int dim() const noexcept { return n_; }
  int size() const noexcept { return static_cast<int>(elements_.size()); }
  const HermitianMatrix& element(int k) const { return elements_.at(static_cast<size_t>(k)); }
  const std::vector<HermitianMatrix>& elements() const noexcept { return elements_; }

  /// Real coordinates of m, length n^2. Isometry: dot(coords(P), coords(Q)) = tr(PQ).
  RealVector coordinates(const HermitianMatrix& m) const;
  HermitianMatrix from_coordinates(const RealVector& coords) const;

 private:
  HermitianBasis(int n, std::vector<HermitianMatrix> elements)
      : n_(n), elements_(std::move(elements)) {}

  int n_;
  std::vector<HermitianMatrix> elements_;
};

/// Principal square root of a PSD Hermitian matrix via eigendecomposition.
/// Eigenvalues below -rel_tol * max_eig are rejected; those in [-tol, 0) are
/// clamped to zero.
HermitianMatrix principal_sqrt(const HermitianMatrix& m, double rel_tol = 1e-10);

/// Derivative of the principal square root at a strictly PD base point:
/// the Hermitian solution D of  D L^{1/2} + L^{1/2} D = X.
HermitianMatrix sqrt_derivative(const HermitianMatrix& lambda, const HermitianMatrix& x,
                                double pd_rel_tol = 1e-12);

/// Eigenvalue clamp: eigenvalues in [-clamp_below, 0) are set to zero, the
/// matrix is rebuilt in the same eigenbasis. Eigenvalues below -clamp_below
/// are left untouched.
HermitianMatrix clamp_tiny_negative_eigenvalues(const HermitianMatrix& m,
                                                double clamp_below = 1e-12);

/// Numerical rank: count of eigenvalues above rel_threshold * max |eigenvalue|.
int numerical_rank(const HermitianMatrix& m, double rel_threshold = 1e-9);

}  // namespace spectralkl
