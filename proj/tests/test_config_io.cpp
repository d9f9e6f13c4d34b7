#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "spectralkl/config.hpp"
#include "spectralkl/report_io.hpp"
#include "support/test_helpers.hpp"

using namespace spectralkl;
namespace tst = spectralkl::testing;

namespace {

const char* kNilpotentConfig = R"({
  "filter": {"A": [[0, 1], [0, 0]], "B": [0, 1]},
  "sigma": "identity",
  "prior": {"factor": {"F": [[0]], "G": [1], "H": [0.5], "D": 1}},
  "solver": {"max_iters": 200, "grid": 128},
  "seed": 7
})";

}  // namespace

TEST_CASE("parsing a complete config") {
  const ProblemConfig config = parse_problem_config(kNilpotentConfig);
  CHECK(config.a.rows() == 2);
  CHECK(std::abs(config.a(0, 1) - Cplx(1.0, 0.0)) == 0.0);
  CHECK(config.b.size() == 2);
  CHECK_FALSE(config.sigma.has_value());
  CHECK(config.solver.max_iters == 200);
  CHECK(config.spectrum_grid == 128);
  CHECK(config.seed == 7);
  CHECK(config.prior_factor.order() == 1);
}

TEST_CASE("complex entries come as re/im pairs") {
  const ProblemConfig config = parse_problem_config(R"({
    "filter": {"A": [[[0, 0.5]]], "B": [[1, -1]]},
    "prior": {"rational": {"num": [1]}}
  })");
  CHECK(config.a(0, 0) == Cplx(0.0, 0.5));
  CHECK(config.b(0) == Cplx(1.0, -1.0));
}

TEST_CASE("parse errors carry the field path") {
  CHECK_THROWS_WITH_AS(parse_problem_config(R"({"prior": {"rational": {"num": [1]}}})"),
                       doctest::Contains("filter"), ParseError);
  CHECK_THROWS_WITH_AS(parse_problem_config(R"({
      "filter": {"A": [[0, 1], [0]], "B": [0, 1]},
      "prior": {"rational": {"num": [1]}}
    })"),
                       doctest::Contains("filter.A"), ParseError);
  CHECK_THROWS_WITH_AS(parse_problem_config(R"({
      "filter": {"A": [[0]], "B": [1]},
      "prior": {"rational": {"num": [-1]}}
    })"),
                       doctest::Contains("prior.rational"), ParseError);
  CHECK_THROWS_AS(parse_problem_config("{ not json"), ParseError);
}

TEST_CASE("prepared problems are normalized") {
  const ProblemConfig config = parse_problem_config(kNilpotentConfig);
  const PreparedProblem prepared = prepare_problem(config, false);
  CHECK(prepared.alpha == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(prepared.psi.zeroth_moment() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(check_feasibility(prepared.fb).feasible);
}

TEST_CASE("sigma scaling feeds through preparation") {
  // Same bank with sigma = 4I: after normalization the problem is identical
  // to the sigma = I case.
  const ProblemConfig config = parse_problem_config(R"({
    "filter": {"A": [[0]], "B": [2]},
    "sigma": [[4]],
    "prior": {"rational": {"num": [1]}}
  })");
  const PreparedProblem prepared = prepare_problem(config, false);
  CHECK(std::abs(prepared.fb.b()(0) - Cplx(1.0, 0.0)) <= 1e-12);
  CHECK(prepared.sigma_normalized);
}

TEST_CASE("doubles survive the 17-digit round trip") {
  auto rng = tst::make_rng(179);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int trial = 0; trial < 200; ++trial) {
    const double value = dist(rng) * std::pow(10.0, trial % 7 - 3);
    CHECK(std::stod(format_double(value)) == value);
  }
}

TEST_CASE("matrix csv round trip is exact") {
  auto rng = tst::make_rng(181);
  const Matrix m = tst::random_complex_matrix(rng, 4, 4);
  const Matrix back = matrix_from_csv_text(matrix_to_csv(m));
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("matrix csv rejects malformed input") {
  CHECK_THROWS_AS(matrix_from_csv_text(""), ParseError);
  CHECK_THROWS_AS(matrix_from_csv_text("1,0,2\n"), ParseError);
  CHECK_THROWS_AS(matrix_from_csv_text("1,x\n"), ParseError);
}

TEST_CASE("atomic write creates the file with exact content") {
  const auto dir = std::filesystem::temp_directory_path() / "spectralkl-io-test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";
  write_file_atomic(path, "a,b\n1,2\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  CHECK_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("series loader accepts re,im lines and bare reals") {
  const auto dir = std::filesystem::temp_directory_path() / "spectralkl-series-test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "series.csv";
  write_file_atomic(path, "# comment\n1.5,-0.5\n2\n");
  const std::vector<Cplx> series = load_complex_series(path);
  REQUIRE(series.size() == 2);
  CHECK(series[0] == Cplx(1.5, -0.5));
  CHECK(series[1] == Cplx(2.0, 0.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("iteration and spectrum csv formatting") {
  std::vector<IterationRecord> log{{1.0, 2.0, 3.0, 4.0, 5.0}};
  const std::string iterations = iterations_to_csv(log);
  CHECK(iterations.find("k,fp_gap,residual,dual_value,min_glg,min_eig\n") == 0);
  CHECK(iterations.find("0,1,2,3,4,5\n") != std::string::npos);

  const UnitCircleGrid grid = UnitCircleGrid::uniform(2);
  const std::string spectrum = spectrum_to_csv(grid, {1.0, 1.0}, {2.0, 2.0}, {0.5, 0.5});
  CHECK(spectrum.find("theta,psi,phi_hat,g_lambda_g\n") == 0);
  CHECK_THROWS_AS(spectrum_to_csv(grid, {1.0}, {2.0, 2.0}, {0.5, 0.5}), DimensionMismatch);
}
