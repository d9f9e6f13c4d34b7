#include "spectralkl/linearized_map.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "spectralkl/moment_engine.hpp"

namespace spectralkl {

namespace {

constexpr double kIdentityEigenvalueTol = 1e-7;

struct FixedPointSamples {
  std::vector<Vector> g;
  std::vector<double> psi;
  std::vector<double> glg;
  Matrix sqrt_lambda;
  int points = 0;
};

FixedPointSamples sample_fixed_point(const FilterBank& fb, const SpectralDensity& psi,
                                     const HermitianMatrix& lambda, int points) {
  FixedPointSamples s;
  s.points = points;
  const UnitCircleGrid grid = UnitCircleGrid::uniform(points);
  s.g = sample_on_grid(fb, grid);
  s.psi.reserve(static_cast<size_t>(points));
  for (int k = 0; k < points; ++k) s.psi.push_back(psi.evaluate(grid.angle(k)));
  s.glg = quadratic_form_samples(s.g, lambda);
  for (int k = 0; k < points; ++k) {
    if (!(s.glg[static_cast<size_t>(k)] > 0.0)) {
      throw SpectrumNotPositive("linearized map: G* Lambda G not positive on the grid");
    }
  }
  s.sqrt_lambda = principal_sqrt(lambda).mat();
  return s;
}

// X - L^{1/2} [ mean_k psi_k (g_k* X g_k)/glg_k^2 (g_k g_k*) ] L^{1/2}
Matrix apply_on_samples(const FixedPointSamples& s, const Matrix& x) {
  std::vector<Matrix> terms;
  terms.reserve(s.g.size());
  for (size_t k = 0; k < s.g.size(); ++k) {
    const Vector& g = s.g[k];
    const Cplx gxg = (g.adjoint() * x * g).value();
    const Cplx weight = s.psi[k] * gxg / (s.glg[k] * s.glg[k]);
    terms.push_back(weight * (g * g.adjoint()));
  }
  const Matrix integral = circle_quadrature(terms);
  Matrix image = x - s.sqrt_lambda * integral * s.sqrt_lambda;
  return 0.5 * (image + image.adjoint().eval());
}

void require_fixed_point(const FilterBank& fb, const SpectralDensity& psi,
                         const HermitianMatrix& lambda, double tol) {
  double residual = 0.0;
  try {
    residual = constraint_residual(fb, psi, lambda);
  } catch (const Error& e) {
    throw NotAFixedPoint(std::string("base point rejected: ") + e.what());
  }
  if (residual > tol) {
    std::ostringstream oss;
    oss << "base point is not a fixed point: constraint residual " << residual;
    throw NotAFixedPoint(oss.str());
  }
}

// Doubles the sampling until the image of x stabilizes.
Matrix apply_adaptive(const FilterBank& fb, const SpectralDensity& psi,
                      const HermitianMatrix& lambda, const Matrix& x,
                      const QuadratureOptions& opts, int* points_out = nullptr) {
  int points = std::max(opts.initial_points, 2);
  FixedPointSamples samples = sample_fixed_point(fb, psi, lambda, points);
  Matrix previous = apply_on_samples(samples, x);
  while (points < opts.max_points) {
    points *= 2;
    samples = sample_fixed_point(fb, psi, lambda, points);
    Matrix current = apply_on_samples(samples, x);
    if ((current - previous).norm() <= opts.rel_tol * std::max(1.0, current.norm())) {
      if (points_out != nullptr) *points_out = points;
      return current;
    }
    previous = std::move(current);
  }
  if (points_out != nullptr) *points_out = points;
  return previous;
}

}  // namespace

HermitianMatrix apply_m(const FilterBank& fb, const SpectralDensity& psi,
                        const HermitianMatrix& lambda_circ, const HermitianMatrix& x,
                        const LinearizedOptions& opts) {
  if (x.dim() != fb.dim() || lambda_circ.dim() != fb.dim()) {
    throw DimensionMismatch("apply_m: dimension mismatch");
  }
  require_fixed_point(fb, psi, lambda_circ, opts.fixed_point_tol);
  return HermitianMatrix(apply_adaptive(fb, psi, lambda_circ, x.mat(), opts.quadrature));
}

LinearizedMapRep build_matrix_rep(const FilterBank& fb, const SpectralDensity& psi,
                                  const HermitianMatrix& lambda_circ,
                                  const GammaDecomposition& gd,
                                  const LinearizedOptions& opts) {
  const int n = fb.dim();
  const int dim = n * n;
  require_fixed_point(fb, psi, lambda_circ, opts.fixed_point_tol);

  // Pick the grid once on a probe direction, then reuse it for every column;
  // one further doubling as margin.
  int probe_points = 0;
  apply_adaptive(fb, psi, lambda_circ, Matrix::Identity(n, n) / std::sqrt(double(n)),
                 opts.quadrature, &probe_points);
  const int points = std::min(std::max(2 * probe_points, opts.quadrature.initial_points),
                              opts.quadrature.max_points);
  const FixedPointSamples samples = sample_fixed_point(fb, psi, lambda_circ, points);

  std::vector<const HermitianMatrix*> ordered;
  ordered.reserve(static_cast<size_t>(dim));
  for (const auto& p : gd.perp_basis) ordered.push_back(&p);
  for (const auto& r : gd.range_basis) ordered.push_back(&r);
  if (static_cast<int>(ordered.size()) != dim) {
    throw DimensionMismatch("build_matrix_rep: decomposition does not span the space");
  }

  LinearizedMapRep rep;
  rep.n_perp = gd.n_perp;
  rep.quadrature_points = points;
  rep.m.resize(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const HermitianMatrix image(
        apply_on_samples(samples, ordered[static_cast<size_t>(j)]->mat()));
    rep.max_column_trace = std::max(rep.max_column_trace, std::abs(image.trace()));
    for (int i = 0; i < dim; ++i) {
      rep.m(i, j) = inner(*ordered[static_cast<size_t>(i)], image);
    }
  }

  rep.identity_block_error =
      (rep.m.topLeftCorner(rep.n_perp, rep.n_perp) -
       RealMatrix::Identity(rep.n_perp, rep.n_perp))
          .cwiseAbs()
          .maxCoeff();
  rep.lower_left_error =
      rep.n_perp < dim && rep.n_perp > 0
          ? rep.m.bottomLeftCorner(dim - rep.n_perp, rep.n_perp).cwiseAbs().maxCoeff()
          : 0.0;
  if (rep.n_perp == 0) rep.identity_block_error = 0.0;

  Eigen::EigenSolver<RealMatrix> es(rep.m);
  if (es.info() != Eigen::Success) throw Error("build_matrix_rep: eigensolver failed");
  rep.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);

  rep.max_abs_imag = 0.0;
  rep.min_real = 1.0;
  double max_contractive = -1.0;
  for (const Cplx& ev : rep.eigenvalues) {
    rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(ev.imag()));
    rep.min_real = std::min(rep.min_real, ev.real());
    if (std::abs(ev - Cplx(1.0, 0.0)) <= kIdentityEigenvalueTol) {
      ++rep.eigenvalues_at_one;
    } else {
      max_contractive = std::max(max_contractive, ev.real());
    }
  }
  rep.spectral_gap = max_contractive < 0.0 ? 1.0 : 1.0 - max_contractive;
  return rep;
}

double eigenvalue_rayleigh_check(const FilterBank& fb, const SpectralDensity& psi,
                                 const HermitianMatrix& lambda_circ,
                                 const HermitianMatrix& y, double alpha,
                                 const QuadratureOptions& opts) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(lambda_circ.mat());
  if (es.info() != Eigen::Success) throw Error("rayleigh check: eigensolver failed");
  const RealVector eigs = es.eigenvalues();
  if (eigs.minCoeff() <= 1e-12 * std::max(eigs.maxCoeff(), 0.0)) {
    throw SingularBase("rayleigh check: base point must be strictly positive definite");
  }
  RealVector quarter = eigs;
  for (int i = 0; i < quarter.size(); ++i) quarter(i) = std::pow(eigs(i), -0.25);
  const Matrix inv_quarter =
      es.eigenvectors() * quarter.asDiagonal() * es.eigenvectors().adjoint();

  const Matrix scaled = inv_quarter * y.mat() * inv_quarter;
  const double denominator = (scaled * scaled).trace().real();

  const double numerator =
      adaptive_circle_integral(
          [&](double theta) {
            const Vector g = fb.evaluate(Cplx(std::cos(theta), std::sin(theta)));
            const double glg = (g.adjoint() * lambda_circ.mat() * g).value().real();
            const double gyg = (g.adjoint() * y.mat() * g).value().real();
            return psi.evaluate(theta) * gyg * gyg / (glg * glg);
          },
          opts)
          .value;

  return std::abs((1.0 - alpha) - numerator / denominator);
}

std::pair<double, double> lindblad_check(const FilterBank& fb, const SpectralDensity& psi,
                                         const HermitianMatrix& lambda_circ,
                                         const UnitCircleGrid& grid,
                                         const LinearizedOptions& opts) {
  const int n = fb.dim();
  require_fixed_point(fb, psi, lambda_circ, opts.fixed_point_tol);
  const Matrix sqrt_lambda = principal_sqrt(lambda_circ).mat();

  std::vector<Matrix> l_samples;
  l_samples.reserve(static_cast<size_t>(grid.size));
  for (int k = 0; k < grid.size; ++k) {
    const Vector g = fb.evaluate(grid.point(k));
    const double glg = (g.adjoint() * lambda_circ.mat() * g).value().real();
    if (!(glg > 0.0)) {
      throw SpectrumNotPositive("lindblad check: G* Lambda G not positive on the grid");
    }
    const double weight = std::sqrt(psi.evaluate(grid.angle(k))) / glg;
    l_samples.push_back(sqrt_lambda * (weight * (g * g.adjoint())));
  }

  std::vector<Matrix> normal_terms;
  normal_terms.reserve(l_samples.size());
  for (const Matrix& l : l_samples) normal_terms.push_back(l.adjoint() * l);
  const double first = (circle_quadrature(normal_terms) - Matrix::Identity(n, n)).norm();

  const HermitianBasis basis = HermitianBasis::standard(n);
  double second = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const Matrix& x = basis.element(j).mat();
    std::vector<Matrix> terms;
    terms.reserve(l_samples.size());
    for (const Matrix& l : l_samples) terms.push_back(l * x * l.adjoint());
    const Matrix via_form = x - circle_quadrature(terms);
    const Matrix via_map = apply_adaptive(fb, psi, lambda_circ, x, opts.quadrature);
    second = std::max(second, (via_form - via_map).norm() / basis.element(j).norm());
  }
  return {first, second};
}

double finite_difference_consistency(const FilterBank& fb, const SpectralDensity& psi,
                                     const HermitianMatrix& lambda_circ,
                                     const HermitianMatrix& x, double eps,
                                     const LinearizedOptions& opts) {
  require_fixed_point(fb, psi, lambda_circ, opts.fixed_point_tol);
  ThetaOptions theta_opts;
  theta_opts.dare.scan = opts.quadrature;
  const HermitianMatrix perturbed(lambda_circ.mat() + eps * x.mat());
  const HermitianMatrix at_base = theta_unnormalized(fb, psi, lambda_circ, theta_opts);
  const HermitianMatrix at_perturbed = theta_unnormalized(fb, psi, perturbed, theta_opts);
  const Matrix fd = (at_perturbed.mat() - at_base.mat()) / eps;
  const Matrix lin = apply_adaptive(fb, psi, lambda_circ, x.mat(), opts.quadrature);
  return (fd - lin).norm();
}

std::vector<ExtractedEigenpair> extract_eigenpairs(const LinearizedMapRep& rep,
                                                   const GammaDecomposition& gd) {
  const int dim = static_cast<int>(rep.m.rows());
  std::vector<const HermitianMatrix*> ordered;
  for (const auto& p : gd.perp_basis) ordered.push_back(&p);
  for (const auto& r : gd.range_basis) ordered.push_back(&r);

  Eigen::EigenSolver<RealMatrix> es(rep.m);
  if (es.info() != Eigen::Success) throw Error("extract_eigenpairs: eigensolver failed");

  std::vector<ExtractedEigenpair> pairs;
  pairs.reserve(static_cast<size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    // Eigenvalues are real here up to round-off; the real part of the
    // eigenvector is then an eigenvector as well.
    RealVector coords = es.eigenvectors().col(j).real();
    const double norm = coords.norm();
    if (norm < 1e-12) continue;
    coords /= norm;
    Matrix acc = Matrix::Zero(gd.basis.dim(), gd.basis.dim());
    for (int k = 0; k < dim; ++k) {
      acc += coords(k) * ordered[static_cast<size_t>(k)]->mat();
    }
    HermitianMatrix y(acc);
    pairs.push_back({es.eigenvalues()(j), std::move(y), std::abs(acc.trace().real())});
  }
  return pairs;
}

}  // namespace spectralkl
