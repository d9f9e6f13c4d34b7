#include "spectralkl/filter_bank.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "spectralkl/log.hpp"
#include "spectralkl/lyapunov.hpp"

namespace spectralkl {

namespace {

int svd_rank(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double threshold = rel_tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return rank;
}

Matrix controllability_matrix(const Matrix& a, const Vector& b) {
  const int n = static_cast<int>(a.rows());
  Matrix ctrl(n, n);
  Vector col = b;
  for (int k = 0; k < n; ++k) {
    ctrl.col(k) = col;
    col = a * col;
  }
  return ctrl;
}

}  // namespace

FilterBank::FilterBank(Matrix a, Vector b, const FilterBankOptions& opts)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols()) throw DimensionMismatch("filter bank: A must be square");
  if (b_.size() != a_.rows()) throw DimensionMismatch("filter bank: B length must match A");
  if (a_.rows() < 1) throw DimensionMismatch("filter bank: empty state space");

  rho_a_ = spectral_radius(a_);
  if (rho_a_ >= 1.0) {
    std::ostringstream oss;
    oss << "filter bank: A is not stable (spectral radius " << rho_a_ << ")";
    throw UnstableA(oss.str());
  }

  const int rank = svd_rank(controllability_matrix(a_, b_), opts.rank_tol);
  if (rank < dim()) {
    std::ostringstream oss;
    oss << "filter bank: (A, B) not reachable (controllability rank " << rank << " of "
        << dim() << ")";
    throw NotReachable(oss.str());
  }

  Eigen::ComplexEigenSolver<Matrix> es(a_, /*computeEigenvectors=*/false);
  singular_a_ = es.eigenvalues().cwiseAbs().minCoeff() <= opts.origin_eigenvalue_tol;
  if (!singular_a_) {
    if (opts.require_singular_a) {
      throw KlModeViolation(
          "filter bank: A has no eigenvalue at the origin; the divergence is only a "
          "pseudo-distance in that case (pass the waiver to proceed)");
    }
    warn("filter bank: A has no eigenvalue at the origin; proceeding, but the objective "
         "loses its approximation interpretation");
  }
}

Vector FilterBank::evaluate(Cplx z) const {
  const Matrix shifted = z * Matrix::Identity(dim(), dim()) - a_;
  Eigen::PartialPivLU<Matrix> lu(shifted);
  Vector g = lu.solve(b_);
  if (!g.allFinite()) throw EvaluationSingular("filter bank: evaluation point hits a pole");
  return g;
}

std::vector<Vector> sample_on_grid(const FilterBank& fb, const UnitCircleGrid& grid) {
  std::vector<Vector> samples;
  samples.reserve(static_cast<size_t>(grid.size));
  for (int k = 0; k < grid.size; ++k) {
    samples.push_back(fb.evaluate(grid.point(k)));
  }
  return samples;
}

std::vector<double> quadratic_form_samples(std::span<const Vector> g_samples,
                                           const HermitianMatrix& lambda) {
  std::vector<double> values;
  values.reserve(g_samples.size());
  for (const Vector& g : g_samples) {
    values.push_back((g.adjoint() * lambda.mat() * g).value().real());
  }
  return values;
}

FilterBank normalize_problem(const FilterBank& fb, const HermitianMatrix& sigma,
                             double alpha, const FilterBankOptions& opts) {
  if (sigma.dim() != fb.dim()) throw DimensionMismatch("normalize: sigma dimension mismatch");
  if (!(alpha > 0.0)) throw Error("normalize: alpha must be positive");

  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.mat());
  if (es.info() != Eigen::Success) throw Error("normalize: eigendecomposition failed");
  const RealVector eigs = es.eigenvalues();
  if (eigs.minCoeff() <= 1e-12 * std::max(eigs.maxCoeff(), 0.0)) {
    throw SigmaNotPD("normalize: sigma is not positive definite");
  }
  RealVector root = eigs.cwiseSqrt();
  const Matrix s_half = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  const Matrix s_inv_half =
      es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();

  const Matrix a_prime = s_inv_half * fb.a() * s_half;
  const Vector b_prime = std::sqrt(alpha) * (s_inv_half * fb.b());
  return FilterBank(a_prime, b_prime, opts);
}

HermitianMatrix steady_state_covariance(const FilterBank& fb) {
  const Matrix q = fb.b() * fb.b().adjoint();
  Matrix xi;
  try {
    xi = solve_discrete_lyapunov(fb.a(), q);
  } catch (const LyapunovSolveFailure&) {
    throw UnstableA("steady-state covariance: A is not stable");
  }
  return HermitianMatrix(xi);
}

std::optional<double> constant_zeroth_moment(const FilterBank& fb, double tol) {
  Eigen::JacobiSVD<Matrix> svd(fb.a(), Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double threshold = std::max(tol * sv(0), tol);
  const int last = static_cast<int>(sv.size()) - 1;
  if (sv(last) > threshold) return std::nullopt;
  // Unit left null vector of A; reachability forces v* B != 0.
  const Vector v = svd.matrixU().col(last);
  const double vb = std::abs((v.adjoint() * fb.b()).value());
  if (vb <= 0.0) throw NotReachable("zeroth moment: left null vector orthogonal to B");
  return 1.0 / (vb * vb);
}

GammaDecomposition gamma_decomposition(const FilterBank& fb, int grid_size,
                                       double svd_rel_tol) {
  const int n = fb.dim();
  if (grid_size < 2 * n) {
    std::ostringstream oss;
    oss << "gamma decomposition: grid of " << grid_size << " points cannot determine the "
        << "sampled form for n = " << n << " (need at least " << 2 * n << ")";
    throw GridTooCoarse(oss.str());
  }
  HermitianBasis basis = HermitianBasis::standard(n);
  const UnitCircleGrid grid = UnitCircleGrid::uniform(grid_size);
  const std::vector<Vector> g = sample_on_grid(fb, grid);

  // Rows sample X -> G* X G against the basis; for Hermitian X the value is real.
  RealMatrix s(grid_size, basis.size());
  for (int k = 0; k < grid_size; ++k) {
    for (int j = 0; j < basis.size(); ++j) {
      s(k, j) = (g[static_cast<size_t>(k)].adjoint() * basis.element(j).mat() *
                 g[static_cast<size_t>(k)])
                    .value()
                    .real();
    }
  }

  Eigen::JacobiSVD<RealMatrix> svd(s, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = svd_rel_tol * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  const int n_perp = basis.size() - rank;

  GammaDecomposition gd{{}, {}, n_perp, std::move(basis)};
  gd.range_basis.reserve(static_cast<size_t>(rank));
  gd.perp_basis.reserve(static_cast<size_t>(n_perp));
  for (int j = 0; j < rank; ++j) {
    gd.range_basis.push_back(gd.basis.from_coordinates(svd.matrixV().col(j)));
  }
  for (int j = rank; j < gd.basis.size(); ++j) {
    gd.perp_basis.push_back(gd.basis.from_coordinates(svd.matrixV().col(j)));
  }
  return gd;
}

FeasibilityVerdict check_feasibility(const FilterBank& fb) {
  const int grid_size = std::max(2 * fb.dim(), 64);
  return check_feasibility(fb, gamma_decomposition(fb, grid_size));
}

FeasibilityVerdict check_feasibility(const FilterBank& fb, const GammaDecomposition& gd) {
  const int n = fb.dim();
  FeasibilityVerdict verdict;
  verdict.n_perp = gd.n_perp;

  Matrix lhs(n + 1, n + 1);
  lhs.topLeftCorner(n, n) = Matrix::Identity(n, n) - fb.a() * fb.a().adjoint();
  lhs.topRightCorner(n, 1) = fb.b();
  lhs.bottomLeftCorner(1, n) = fb.b().adjoint();
  lhs(n, n) = 0.0;
  Matrix rhs = Matrix::Zero(n + 1, n + 1);
  rhs.topRightCorner(n, 1) = fb.b();
  rhs.bottomLeftCorner(1, n) = fb.b().adjoint();

  verdict.rank_lhs = svd_rank(lhs, 1e-10);
  verdict.rank_rhs = svd_rank(rhs, 1e-10);
  verdict.rank_condition_ok = verdict.rank_lhs == verdict.rank_rhs;

  const HermitianMatrix identity = HermitianMatrix::identity(n);
  Matrix projection = Matrix::Zero(n, n);
  for (const HermitianMatrix& r : gd.range_basis) {
    projection += inner(identity, r) * r.mat();
  }
  verdict.identity_distance = (identity.mat() - projection).norm();
  verdict.identity_in_range_ok =
      verdict.identity_distance <= 1e-8 * std::sqrt(static_cast<double>(n));

  verdict.tests_agree = verdict.rank_condition_ok == verdict.identity_in_range_ok;
  verdict.feasible = verdict.identity_in_range_ok;
  if (!verdict.tests_agree) {
    warn("feasibility: rank test and range test disagree; trusting the range test");
  }
  return verdict;
}

HermitianMatrix estimate_sigma(const FilterBank& fb, std::span<const Cplx> samples,
                               int burn_in) {
  const int n = fb.dim();
  if (burn_in < 0) throw Error("estimate_sigma: negative burn-in");
  if (static_cast<long>(samples.size()) <= static_cast<long>(burn_in) + 10L * n) {
    throw InsufficientData("estimate_sigma: need more than burn_in + 10 n samples");
  }
  Vector x = Vector::Zero(n);
  Matrix acc = Matrix::Zero(n, n);
  long count = 0;
  for (size_t t = 0; t < samples.size(); ++t) {
    x = (fb.a() * x + fb.b() * samples[t]).eval();
    if (static_cast<long>(t) + 1 > burn_in) {
      acc += x * x.adjoint();
      ++count;
    }
  }
  acc /= static_cast<double>(count);
  return HermitianMatrix(0.5 * (acc + acc.adjoint().eval()));
}

}  // namespace spectralkl
