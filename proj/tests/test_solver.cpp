#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "wh/solver.hpp"

using namespace wh;

namespace {

KernelSpec gamma0_K() { return build_K_from_K1(oracle::gamma_family(0.0)); }

KernelSpec even_exp_K() {
  return build_K_from_K1(build_K1_from_K0(oracle::even_exp_k0()));
}

GridFunction unit_exp(double T, int n) {
  return GridFunction::sample(T, n, [](double t) { return std::exp(-t); });
}

}  // namespace

TEST_CASE("discretization shapes") {
  SUBCASE("gamma = 0 kernel is lower triangular up to the diagonal jump") {
    const DiscretizedOperator A = discretize(gamma0_K(), 10.0, 32);
    CHECK(A.is_real());
    for (int i = 0; i < A.n; ++i)
      for (int j = i + 1; j < A.n; ++j) CHECK(A.matrix(i, j) == cplx(0.0));
    // diagonal carries the half-jump value K(0) = 1/2
    CHECK(A.matrix(5, 5).real() == doctest::Approx(0.5 * A.weights(5)));
  }
  SUBCASE("zero kernel gives the zero matrix") {
    const KernelSpec zero = KernelSpec::closed_form(KernelLevel::K, {}, {});
    const DiscretizedOperator A = discretize(zero, 10.0, 32);
    CHECK(A.matrix.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("even kernel is symmetric up to weight scaling") {
    const DiscretizedOperator A = discretize(even_exp_K(), 10.0, 48);
    for (int i = 0; i < A.n; ++i)
      for (int j = 0; j < A.n; ++j)
        CHECK(A.matrix(i, j).real() / A.weights(j) ==
              doctest::Approx(A.matrix(j, i).real() / A.weights(i)));
  }
  SUBCASE("level tag is enforced") {
    CHECK_THROWS_AS((void)discretize(oracle::gamma_family(0.0), 10.0, 32),
                    std::invalid_argument);
  }
}

TEST_CASE("manufactured right-hand sides match the closed forms") {
  const double T = 40.0;
  const int n = 1024;
  SUBCASE("gamma = 0: f = t e^{-t}") {
    const DiscretizedOperator A = discretize(gamma0_K(), T, n);
    const GridFunction f = manufacture_rhs(A, unit_exp(T, n));
    const GridFunction want =
        GridFunction::sample(T, n, [](double t) { return t * std::exp(-t); });
    // the kernel jumps at 0, so the t = 0 node sees half the jump from
    // outside the domain; away from that node the rows are exact
    GridFunction diff = f - want;
    std::vector<cplx> interior(diff.samples().begin() + 1, diff.samples().end());
    interior.insert(interior.begin(), cplx(0.0));
    CHECK(GridFunction(T, interior).norm() / want.norm() <= 1e-3);
    CHECK(diff.norm() / want.norm() <= 5e-3);
  }
  SUBCASE("phi* = 0: f = 0") {
    const DiscretizedOperator A = discretize(gamma0_K(), 10.0, 64);
    const GridFunction f =
        manufacture_rhs(A, GridFunction(10.0, std::vector<cplx>(64, 0.0)));
    CHECK(f.norm() == 0.0);
  }
  SUBCASE("even kernel: f = t e^{-t}/2 + e^{-t}/4") {
    const DiscretizedOperator A = discretize(even_exp_K(), T, n);
    const GridFunction f = manufacture_rhs(A, unit_exp(T, n));
    const GridFunction want = GridFunction::sample(T, n, [](double t) {
      return 0.5 * t * std::exp(-t) + 0.25 * std::exp(-t);
    });
    CHECK((f - want).norm() / want.norm() <= 1e-3);
  }
}

TEST_CASE("TSVD recovers manufactured solutions") {
  const double T = 40.0;
  const int n = 512;
  for (const KernelSpec& K : {gamma0_K(), even_exp_K()}) {
    const DiscretizedOperator A = discretize(K, T, n);
    const GridFunction phi = unit_exp(T, n);
    const GridFunction f = manufacture_rhs(A, phi);
    const SolveResult res = solve_regularized(A, f);
    CHECK((res.solution - phi).norm() / phi.norm() <= 1e-2);
    CHECK(res.residual_norm <= 1e-8 * f.norm());
    CHECK(res.singular_values.front() >= res.singular_values.back());
  }
}

TEST_CASE("zero right-hand side gives the zero solution") {
  const DiscretizedOperator A = discretize(gamma0_K(), 10.0, 64);
  const GridFunction f(10.0, std::vector<cplx>(64, 0.0));
  const SolveResult res = solve_regularized(A, f);
  CHECK(res.solution.norm() == 0.0);
  CHECK(res.residual_norm == 0.0);
}

TEST_CASE("Tikhonov stays close to TSVD on a benign system") {
  const DiscretizedOperator A = discretize(gamma0_K(), 20.0, 128);
  const GridFunction phi = unit_exp(20.0, 128);
  const GridFunction f = manufacture_rhs(A, phi);
  Regularization tik;
  tik.kind = Regularization::Kind::Tikhonov;
  tik.parameter = 1e-8;
  const SolveResult res = solve_regularized(A, f, tik);
  CHECK((res.solution - phi).norm() / phi.norm() <= 1e-2);
}

TEST_CASE("fixed-rank truncation") {
  const DiscretizedOperator A = discretize(gamma0_K(), 20.0, 64);
  const GridFunction f = manufacture_rhs(A, unit_exp(20.0, 64));
  Regularization reg;
  reg.kind = Regularization::Kind::TsvdRank;
  reg.rank = 8;
  const SolveResult res = solve_regularized(A, f, reg);
  // badly truncated, but well defined and worse than the full solve
  const SolveResult full = solve_regularized(A, f);
  CHECK(res.residual_norm >= full.residual_norm);
  CHECK(res.residual_norm <= f.norm() * (1.0 + 1e-12));
}

TEST_CASE("residuals grow monotonically with the truncation threshold") {
  const DiscretizedOperator A = discretize(even_exp_K(), 20.0, 128);
  const GridFunction f = manufacture_rhs(A, unit_exp(20.0, 128));
  double previous = -1.0;
  for (double thr : {1e-12, 1e-6, 1e-3, 1e-1}) {
    Regularization reg;
    reg.threshold = thr;
    const SolveResult res = solve_regularized(A, f, reg);
    CHECK(res.residual_norm >= previous - 1e-14);
    CHECK(res.residual_norm <= f.norm() * (1.0 + 1e-12));
    previous = res.residual_norm;
  }
}

TEST_CASE("over-aggressive thresholds are an error") {
  const DiscretizedOperator A = discretize(gamma0_K(), 10.0, 32);
  const GridFunction f = manufacture_rhs(A, unit_exp(10.0, 32));
  Regularization reg;
  reg.threshold = 2.0;  // above sigma_max/sigma_max
  CHECK_THROWS_AS((void)solve_regularized(A, f, reg), AllModesDropped);
}

TEST_CASE("doubling n keeps the recovery stable") {
  const double T = 40.0;
  double err[2] = {0.0, 0.0};
  int k = 0;
  for (int n : {256, 512}) {
    const DiscretizedOperator A = discretize(gamma0_K(), T, n);
    const GridFunction phi = unit_exp(T, n);
    const SolveResult res = solve_regularized(A, manufacture_rhs(A, phi));
    err[k++] = (res.solution - phi).norm() / phi.norm();
  }
  CHECK(err[1] <= 2.0 * err[0] + 1e-12);
}

TEST_CASE("null-space probe") {
  SUBCASE("zero operator: everything is null") {
    const KernelSpec zero = KernelSpec::closed_form(KernelLevel::K, {}, {});
    const DiscretizedOperator A = discretize(zero, 10.0, 24);
    const NullSpaceEstimate est = estimate_null_dim(A, 1e-8);
    CHECK(est.count == 24);
    CHECK(est.confident);
    CHECK(est.basis.size() == 24);
  }
  SUBCASE("synthetic spectral gap: identity plus a zero row") {
    DiscretizedOperator A;
    A.T = 1.0;
    A.n = 16;
    A.weights = Eigen::VectorXd::Ones(16);
    A.matrix = Eigen::MatrixXcd::Identity(16, 16);
    A.matrix.row(15).setZero();
    const NullSpaceEstimate est = estimate_null_dim(A, 1e-6);
    CHECK(est.count == 1);
    CHECK(est.confident);
    REQUIRE(est.basis.size() == 1);
  }
  SUBCASE("compact first-kind spectra have no gap: low confidence") {
    const DiscretizedOperator A = discretize(gamma0_K(), 40.0, 128);
    const NullSpaceEstimate est = estimate_null_dim(A, 1e-8);
    CHECK_FALSE(est.confident);  // gapless spectrum flag
  }
}
