// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Tolerances are pinned in the checks themselves.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "spectralkl/linearized_map.hpp"
#include "spectralkl/lyapunov.hpp"
#include "spectralkl/moment_engine.hpp"
#include "spectralkl/riccati.hpp"
#include "spectralkl/solver.hpp"
#include "support/test_helpers.hpp"

using namespace spectralkl;
namespace tst = spectralkl::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream details;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      pass = false;
      details << " FAILED{" << label << "}";
    }
  }
};

struct Instance {
  FilterBank fb;
  SpectralDensity psi;
  int n;
};

std::vector<Instance> make_instances(int count) {
  std::vector<Instance> instances;
  instances.reserve(static_cast<size_t>(count));
  auto rng = tst::make_rng(2024);
  for (int i = 0; i < count; ++i) {
    const int n = 2 + i % 5;
    auto one = tst::random_feasible_instance(rng, n);
    instances.push_back({std::move(one.fb), std::move(one.psi), n});
  }
  return instances;
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Outcome criterion_scalar_closed_form() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const SolverReport report = solve(tst::scalar_bank(), tst::white_prior());
  const double seconds = elapsed_seconds(start);

  out.require(report.converged, "converged");
  out.require(report.iterations <= 2, "iterations <= 2");
  out.require(std::abs(report.lambda_hat.mat()(0, 0) - Cplx(1.0, 0.0)) <= 1e-10,
              "lambda_hat = 1");
  const UnitCircleGrid grid = UnitCircleGrid::uniform(256);
  const std::vector<double> phi =
      output_spectrum(tst::scalar_bank(), tst::white_prior(), report.lambda_hat, grid);
  double max_dev = 0.0;
  for (double v : phi) max_dev = std::max(max_dev, std::abs(v - 1.0));
  out.require(max_dev <= 1e-10, "phi_hat = 1");
  out.require(std::abs(report.kl_value) <= 1e-10, "KL = 0");
  out.require(seconds < 0.1, "runtime < 0.1 s");
  out.details << " iters=" << report.iterations << " kl=" << report.kl_value
              << " t=" << seconds << "s";
  return out;
}

Outcome criterion_two_dim_fixed_point() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const FilterBank fb = tst::nilpotent_bank();
  const SpectralDensity psi = tst::white_prior();
  const GammaDecomposition gd = gamma_decomposition(fb, 64);
  auto rng = tst::make_rng(2);

  SolverConfig cfg;
  cfg.residual_tol = 1e-8;
  std::vector<HermitianMatrix> solutions;
  for (int trial = 0; trial < 5; ++trial) {
    SolverConfig run_cfg = cfg;
    run_cfg.initial = tst::random_density(rng, 2);
    const SolverReport report = solve(fb, psi, run_cfg);
    out.require(report.converged, "trial converged");
    if (!report.converged) continue;
    out.require(report.final_residual <= 1e-8, "residual <= 1e-8");
    // Membership in the diagonal family through I/2.
    out.require(family_distance(gd, report.lambda_hat,
                                HermitianMatrix(0.5 * Matrix::Identity(2, 2))) <= 1e-6,
                "lambda_hat in the diagonal family");
    solutions.push_back(report.lambda_hat);
  }
  double max_pair_distance = 0.0;
  for (size_t i = 0; i < solutions.size(); ++i) {
    for (size_t j = i + 1; j < solutions.size(); ++j) {
      max_pair_distance =
          std::max(max_pair_distance, family_distance(gd, solutions[i], solutions[j]));
    }
  }
  out.require(max_pair_distance <= 1e-6, "family distance between runs <= 1e-6");
  const double seconds = elapsed_seconds(start);
  out.require(seconds < 1.0, "runtime < 1 s");
  out.details << " runs=" << solutions.size() << " max_pair_dist=" << max_pair_distance
              << " t=" << seconds << "s";
  return out;
}

Outcome criterion_oracle_equivalence(const std::vector<Instance>& instances,
                                     std::vector<FactorizationResult>* accepted_solves,
                                     std::vector<const FilterBank*>* accepted_banks,
                                     std::vector<HermitianMatrix>* accepted_lambdas) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  auto rng = tst::make_rng(3);
  double worst = 0.0;
  for (const Instance& instance : instances) {
    std::vector<DensityMatrix> lambdas{DensityMatrix::uniform(instance.n),
                                       tst::random_density(rng, instance.n),
                                       tst::random_density(rng, instance.n)};
    for (const DensityMatrix& lambda : lambdas) {
      const FactorizationResult fr = solve_dare(instance.fb, lambda.hermitian());
      const HermitianMatrix lyap = moment_integral_lyapunov(instance.fb, instance.psi, fr);
      const HermitianMatrix quad = moment_integral_quadrature(
          instance.fb, instance.psi, lambda.hermitian(), {512, 65536, 1e-11});
      const double gap = (lyap.mat() - quad.mat()).norm() / std::max(1.0, quad.norm());
      worst = std::max(worst, gap);
      accepted_solves->push_back(fr);
      accepted_banks->push_back(&instance.fb);
      accepted_lambdas->push_back(lambda.hermitian());
    }
  }
  out.require(worst <= 1e-6, "route agreement <= 1e-6 relative");
  const double seconds = elapsed_seconds(start);
  out.require(seconds < 30.0, "runtime < 30 s");
  out.details << " solves=" << accepted_solves->size() << " worst_gap=" << worst
              << " t=" << seconds << "s";
  return out;
}

Outcome criterion_theta_invariants(const std::vector<Instance>& instances) {
  Outcome out;
  auto rng = tst::make_rng(4);
  double worst_trace = 0.0;
  double worst_eig = 0.0;
  int kernel_checks = 0;
  for (const Instance& instance : instances) {
    DensityMatrix lambda = tst::random_density(rng, instance.n);
    for (int step = 0; step < 3; ++step) {
      lambda = theta(instance.fb, instance.psi, lambda);
      worst_trace = std::max(worst_trace, std::abs(lambda.hermitian().trace() - 1.0));
      worst_eig = std::min(worst_eig, lambda.hermitian().min_eigenvalue());
    }

    // Rank-deficient start: a rank-one density built from the factor vector
    // keeps the sampled form positive; its kernel must be preserved.
    const FactorizationResult fr =
        solve_dare(instance.fb, HermitianMatrix(Matrix::Identity(instance.n, instance.n) /
                                                static_cast<double>(instance.n)));
    const Vector c = construct_c_vector(instance.fb, fr);
    Matrix rank_one = c * c.adjoint();
    rank_one /= rank_one.trace().real();
    DensityMatrix deficient{HermitianMatrix(rank_one)};
    const int rank_before = numerical_rank(deficient.hermitian(), 1e-9);
    for (int step = 0; step < 3; ++step) {
      deficient = theta(instance.fb, instance.psi, deficient);
      out.require(numerical_rank(deficient.hermitian(), 1e-9) == rank_before,
                  "kernel preserved");
      ++kernel_checks;
    }
  }
  out.require(worst_trace <= 1e-10, "trace preserved within 1e-10");
  out.require(worst_eig >= -1e-10, "eigenvalues >= -1e-10");
  out.details << " worst_trace_dev=" << worst_trace << " worst_min_eig=" << worst_eig
              << " kernel_checks=" << kernel_checks;
  return out;
}

Outcome criterion_spectral_factorization(
    const std::vector<FactorizationResult>& solves,
    const std::vector<const FilterBank*>& banks,
    const std::vector<HermitianMatrix>& lambdas) {
  Outcome out;
  const UnitCircleGrid grid = UnitCircleGrid::uniform(256);
  double worst_rel = 0.0;
  double worst_rho = 0.0;
  for (size_t i = 0; i < solves.size(); ++i) {
    double worst_abs = 0.0;
    double scale = 0.0;
    for (int k = 0; k < grid.size; ++k) {
      const Cplx z = grid.point(k);
      const Vector g = banks[i]->evaluate(z);
      const double glg = (g.adjoint() * lambdas[i].mat() * g).value().real();
      const double w_sq = std::norm(solves[i].w.evaluate(z));
      worst_abs = std::max(worst_abs, std::abs(w_sq - glg));
      scale = std::max(scale, glg);
    }
    worst_rel = std::max(worst_rel, worst_abs / scale);
    worst_rho = std::max(worst_rho, solves[i].rho_z);
  }
  out.require(worst_rel <= 1e-8, "factorization identity <= 1e-8 relative");
  out.require(worst_rho < 1.0, "closed loop stable");

  auto rng = tst::make_rng(5);
  double worst_popov = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const FilterBank fb = tst::random_feasible_bank(rng, n);
    const HermitianMatrix pi = tst::random_hermitian(rng, n);
    const double residual = verify_popov_identity(fb, pi, grid) / std::max(1.0, pi.norm());
    worst_popov = std::max(worst_popov, residual);
  }
  out.require(worst_popov <= 1e-10, "quadratic identity <= 1e-10");
  out.details << " worst_rel=" << worst_rel << " worst_rho_z=" << worst_rho
              << " worst_identity=" << worst_popov;
  return out;
}

struct ConvergedCertificates {
  std::vector<const Instance*> instances;
  std::vector<HermitianMatrix> lambdas;
  std::vector<SolverReport> reports;
  int attempted = 0;
};

ConvergedCertificates solve_instances(const std::vector<Instance>& instances) {
  ConvergedCertificates certs;
  auto rng = tst::make_rng(6);
  for (const Instance& instance : instances) {
    ++certs.attempted;
    SolverConfig cfg;
    cfg.max_iters = 3000;
    cfg.fp_tol = 1e-11;
    cfg.residual_tol = 1e-9;
    SolverReport report = solve(instance.fb, instance.psi, cfg);
    if (!report.converged) {
      // Singular attractors exist; restart once from a random interior point.
      cfg.initial = tst::random_density(rng, instance.n);
      report = solve(instance.fb, instance.psi, cfg);
    }
    if (!report.converged) continue;
    certs.instances.push_back(&instance);
    certs.lambdas.push_back(report.lambda_hat);
    certs.reports.push_back(report);
  }
  return certs;
}

Outcome criterion_linearized_map(const ConvergedCertificates& certs) {
  Outcome out;
  int analyzed = 0;
  double worst_im = 0.0;
  double min_re = 1.0;
  double min_gap = 1.0;
  double worst_rayleigh = 0.0;
  double worst_normalization = 0.0;
  for (size_t i = 0; i < certs.instances.size(); ++i) {
    const Instance& instance = *certs.instances[i];
    HermitianMatrix base = certs.lambdas[i];
    if (base.min_eigenvalue() < 1e-6) {
      // Swap in the strictly positive member of the same solution family.
      base = make_strictly_pd(instance.fb, base, UnitCircleGrid::uniform(2048));
    }
    const GammaDecomposition gd =
        gamma_decomposition(instance.fb, std::max(2 * instance.n, 64));
    LinearizedMapRep rep;
    try {
      rep = build_matrix_rep(instance.fb, instance.psi, base, gd);
    } catch (const NotAFixedPoint&) {
      out.require(false, "certificate accepted as base point");
      continue;
    }
    ++analyzed;
    worst_im = std::max(worst_im, rep.max_abs_imag);
    min_re = std::min(min_re, rep.min_real);
    out.require(rep.eigenvalues_at_one == gd.n_perp, "identity multiplicity = n_perp");
    out.require(rep.spectral_gap > 0.0, "positive spectral gap");
    min_gap = std::min(min_gap, rep.spectral_gap);

    for (const ExtractedEigenpair& pair : extract_eigenpairs(rep, gd)) {
      if (pair.trace_abs > 1e-8) continue;
      worst_rayleigh = std::max(
          worst_rayleigh,
          eigenvalue_rayleigh_check(instance.fb, instance.psi, base, pair.eigenmatrix,
                                    pair.eigenvalue.real()));
    }
    const auto [normalization, form_gap] = lindblad_check(
        instance.fb, instance.psi, base, UnitCircleGrid::uniform(rep.quadrature_points));
    worst_normalization = std::max(worst_normalization, std::max(normalization, form_gap));
  }
  out.require(analyzed >= 10, "enough converged instances to analyze");
  out.require(worst_im <= 1e-7, "eigenvalues real within 1e-7");
  out.require(min_re >= -1e-7, "eigenvalues >= -1e-7");
  out.require(worst_rayleigh <= 1e-6, "eigenvalue identity within 1e-6");
  out.require(worst_normalization <= 1e-6, "kernel normalization within 1e-6");

  // The two-dimensional example has the known spectrum {1, 1/2, 1/2, 0}.
  const FilterBank fb = tst::nilpotent_bank();
  const GammaDecomposition gd = gamma_decomposition(fb, 64);
  const LinearizedMapRep rep = build_matrix_rep(
      fb, tst::white_prior(), HermitianMatrix(0.5 * Matrix::Identity(2, 2)), gd);
  std::vector<double> reals;
  for (const Cplx& ev : rep.eigenvalues) reals.push_back(ev.real());
  std::sort(reals.begin(), reals.end());
  const std::vector<double> expected{0.0, 0.5, 0.5, 1.0};
  for (size_t i = 0; i < expected.size(); ++i) {
    out.require(std::abs(reals[i] - expected[i]) <= 1e-7 &&
                    std::abs(rep.eigenvalues[i].imag()) <= 1e-7,
                "two-dim spectrum {1, 0, 1/2, 1/2}");
  }
  out.details << " analyzed=" << analyzed << "/" << certs.attempted
              << " max_im=" << worst_im << " min_re=" << min_re << " min_gap=" << min_gap
              << " worst_rayleigh=" << worst_rayleigh
              << " worst_normalization=" << worst_normalization;
  return out;
}

Outcome criterion_local_convergence() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const FilterBank fb = tst::nilpotent_bank();
  const SpectralDensity psi = tst::white_prior();
  const GammaDecomposition gd = gamma_decomposition(fb, 64);
  const HermitianMatrix reference(0.5 * Matrix::Identity(2, 2));
  auto rng = tst::make_rng(7);

  int worst_iterations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix direction = tst::random_unit_hermitian(rng, 2);
    Matrix perturbed = reference.mat() + 1e-2 * direction.mat();
    perturbed /= perturbed.trace().real();
    DensityMatrix lambda{HermitianMatrix(perturbed)};

    bool returned = false;
    for (int k = 0; k <= 500; ++k) {
      if (family_distance(gd, lambda.hermitian(), reference) <= 1e-7) {
        returned = true;
        worst_iterations = std::max(worst_iterations, k);
        break;
      }
      lambda = theta(fb, psi, lambda);
    }
    out.require(returned, "returned to the solution family within 500 iterations");
  }
  const double seconds = elapsed_seconds(start);
  out.require(seconds < 60.0, "runtime < 60 s");
  out.details << " trials=20 worst_return=" << worst_iterations << " iters t=" << seconds
              << "s";
  return out;
}

Outcome criterion_existence_construction() {
  Outcome out;
  const FilterBank fb = tst::nilpotent_bank();
  Matrix indefinite(2, 2);
  indefinite << 1.5, 0.0, 0.0, -0.5;
  const HermitianMatrix member(indefinite);
  const UnitCircleGrid grid = UnitCircleGrid::uniform(512);

  const HermitianMatrix pd = make_strictly_pd(fb, member, grid);
  out.require(pd.min_eigenvalue() > 0.0, "strictly positive definite");

  const std::vector<Vector> g = sample_on_grid(fb, grid);
  const std::vector<double> before = quadratic_form_samples(g, member);
  const std::vector<double> after = quadratic_form_samples(g, pd);
  double worst = 0.0;
  for (int k = 0; k < grid.size; ++k) {
    worst = std::max(worst, std::abs(after[size_t(k)] - before[size_t(k)]) /
                                std::max(1.0, std::abs(before[size_t(k)])));
  }
  out.require(worst <= 1e-8, "sampled form reproduced within 1e-8");
  out.details << " min_eig=" << pd.min_eigenvalue() << " worst_form_gap=" << worst;
  return out;
}

Outcome criterion_finite_differences() {
  Outcome out;
  auto rng = tst::make_rng(9);

  // Square-root derivative against difference quotients.
  const Matrix c = tst::random_complex_matrix(rng, 3, 3);
  const HermitianMatrix base(c * c.adjoint() + 0.4 * Matrix::Identity(3, 3));
  const Matrix base_root = principal_sqrt(base).mat();
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix x = tst::random_unit_hermitian(rng, 3);
    const HermitianMatrix d = sqrt_derivative(base, x);
    double previous = 0.0;
    bool first = true;
    for (const double eps : {1e-4, 1e-5}) {
      const HermitianMatrix bumped(base.mat() + eps * x.mat());
      const double error = ((principal_sqrt(bumped).mat() - base_root) / eps - d.mat()).norm();
      if (!first) {
        out.require(error <= 0.5 * previous + 1e-9, "first-order decay (sqrt)");
      }
      previous = error;
      first = false;
    }
  }

  // Map derivative at the two-dimensional fixed point.
  const FilterBank fb = tst::nilpotent_bank();
  const SpectralDensity psi = tst::white_prior();
  const HermitianMatrix fixed(0.5 * Matrix::Identity(2, 2));
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix x = tst::random_unit_hermitian(rng, 2);
    const double e1 = finite_difference_consistency(fb, psi, fixed, x, 1e-4);
    const double e2 = finite_difference_consistency(fb, psi, fixed, x, 1e-5);
    out.require(e2 <= 0.5 * e1 + 1e-9, "first-order decay (map)");
  }
  out.details << " directions=20+20";
  return out;
}

Outcome criterion_dual_descent(const ConvergedCertificates& certs) {
  Outcome out;
  long total_steps = 0;
  long increases = 0;
  for (const SolverReport& report : certs.reports) {
    total_steps += static_cast<long>(report.log.size()) - 1;
    increases += report.dual_increase_steps;
  }
  const double fraction =
      total_steps > 0 ? 1.0 - static_cast<double>(increases) / total_steps : 1.0;
  out.require(total_steps > 0, "logged steps available");
  out.require(fraction >= 0.95, "dual non-increasing in >= 95% of steps");
  out.details << " non_increasing_fraction=" << fraction << " increases=" << increases
              << "/" << total_steps;
  return out;
}

}  // namespace

int main() {
  std::vector<Instance> instances = make_instances(50);

  std::vector<FactorizationResult> solves;
  std::vector<const FilterBank*> banks;
  std::vector<HermitianMatrix> lambdas;

  const auto t0 = std::chrono::steady_clock::now();
  ConvergedCertificates certs = solve_instances(instances);
  const double solve_time = elapsed_seconds(t0);

  struct Entry {
    std::string label;
    Outcome outcome;
  };
  std::vector<Entry> entries;
  entries.push_back({"1. scalar closed form", criterion_scalar_closed_form()});
  entries.push_back({"2. two-dimensional analytic fixed point",
                     criterion_two_dim_fixed_point()});
  entries.push_back({"3. oracle equivalence on 50 randomized instances",
                     criterion_oracle_equivalence(instances, &solves, &banks, &lambdas)});
  entries.push_back({"4. fixed-point map invariants", criterion_theta_invariants(instances)});
  entries.push_back(
      {"5. spectral factorization", criterion_spectral_factorization(solves, banks, lambdas)});
  entries.push_back({"6. linearized-map spectral claims", criterion_linearized_map(certs)});
  entries.push_back({"7. local convergence under perturbation",
                     criterion_local_convergence()});
  entries.push_back({"8. strictly positive representative construction",
                     criterion_existence_construction()});
  entries.push_back({"9. finite-difference consistency", criterion_finite_differences()});
  entries.push_back({"10. dual descent diagnostic", criterion_dual_descent(certs)});

  int failures = 0;
  for (const Entry& entry : entries) {
    const bool pass = entry.outcome.pass;
    if (!pass) ++failures;
    std::printf("[%s] %s:%s\n", pass ? "PASS" : "FAIL", entry.label.c_str(),
                entry.outcome.details.str().c_str());
  }
  std::printf("converged certificates: %zu/%d (randomized solve time %.1f s)\n",
              certs.reports.size(), certs.attempted, solve_time);
  std::printf("%s: %d/%zu criteria passed\n", failures == 0 ? "SUCCESS" : "FAILURE",
              static_cast<int>(entries.size()) - failures, entries.size());
  return failures;
}
