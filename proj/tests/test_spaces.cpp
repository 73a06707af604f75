#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wh/spaces.hpp"

using namespace wh;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridFunction expdec(double rate, double T = 40.0, int n = 2048) {
  return GridFunction::sample(T, n, [rate](double t) { return std::exp(-rate * t); });
}

double rel_gap(const GridFunction& got, const GridFunction& want) {
  return (got - want).norm() / want.norm();
}

double max_abs_gap(const GridFunction& got, const std::function<cplx(double)>& want) {
  double m = 0.0;
  for (int j = 0; j < got.size(); ++j)
    m = std::max(m, std::abs(got[j] - want(got.t(j))));
  return m;
}

}  // namespace

TEST_CASE("grid function basics") {
  CHECK_THROWS_AS(GridFunction(1.0, std::vector<cplx>(4, 0.0)), std::invalid_argument);
  const GridFunction f = expdec(1.0);
  CHECK(f.size() == 2048);
  CHECK(f.t(0) == 0.0);
  CHECK(f.t(f.size() - 1) == doctest::Approx(40.0));
  // ||e^{-t}||^2 = 1/2 over the half-line; truncation at 40 is invisible
  CHECK(f.norm() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));

  const GridFunction s = GridFunction::sample(
      40.0, 2049, [](double t) { return std::exp(-t); }, QuadRule::Simpson);
  CHECK(s.norm() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
}

TEST_CASE("derivative accuracy") {
  const GridFunction f = expdec(1.0);
  const GridFunction d = f.derivative();
  CHECK(max_abs_gap(d, [](double t) { return -std::exp(-t); }) < 1e-7);
  const GridFunction d2 = f.derivative(2);
  CHECK(max_abs_gap(d2, [](double t) { return -std::exp(-t); }) < 2e-6);
}

TEST_CASE("B_inf on the unit exponential") {
  // i e^t int_t^inf e^{-2s} ds = (i/2) e^{-t}
  const GridFunction f = apply_B(expdec(1.0), kInf);
  const double err = max_abs_gap(f, [](double t) { return cplx(0.0, 0.5 * std::exp(-t)); });
  CHECK(err < 1e-8);
}

TEST_CASE("B_0 on the unit exponential") {
  // e^{-t} - e^t e^{-2t}/2 = (1/2) e^{-t}
  const GridFunction f = apply_B(expdec(1.0), 0.0);
  CHECK(max_abs_gap(f, [](double t) { return 0.5 * std::exp(-t); }) < 1e-8);
}

TEST_CASE("operators annihilate zero") {
  const GridFunction zero(10.0, std::vector<cplx>(64, 0.0));
  for (double alpha : {0.0, 2.0, kInf}) {
    CHECK(apply_B(zero, alpha).norm() == 0.0);
    CHECK(apply_G(zero, alpha).norm() == 0.0);
  }
}

TEST_CASE("G_0 turns the unit exponential into a constant") {
  // e^{-t} + (1 - e^{-t}) = 1
  const GridFunction f = apply_G(expdec(1.0), 0.0);
  CHECK(max_abs_gap(f, [](double) { return 1.0; }) < 1e-8);
}

TEST_CASE("G_inf as printed kills the unit exponential") {
  const GridFunction f = apply_G(expdec(1.0), kInf);
  CHECK(f.norm() < 1e-7);
}

TEST_CASE("G_alpha against a hand integration") {
  // (G_2 phi)(t) for phi = e^{-t}: phi + (1-2i) e^{-2it} int_0^t e^{(2i-1)s} ds
  const double alpha = 2.0;
  const GridFunction f = apply_G(expdec(1.0, 20.0, 1024), alpha);
  auto want = [alpha](double t) {
    const cplx i(0.0, 1.0);
    const cplx rate = i * alpha - 1.0;
    const cplx integral = (std::exp(rate * t) - 1.0) / rate;
    return std::exp(-t) + (1.0 - i * alpha) * std::exp(-i * alpha * t) * integral;
  };
  CHECK(max_abs_gap(f, want) < 1e-8);
}

TEST_CASE("operators are linear") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 256;
  const double T = 20.0;
  std::vector<cplx> xs(n), ys(n);
  for (int j = 0; j < n; ++j) {
    xs[std::size_t(j)] = cplx(u(rng), u(rng)) * std::exp(-0.3 * j * T / (n - 1));
    ys[std::size_t(j)] = cplx(u(rng), u(rng)) * std::exp(-0.2 * j * T / (n - 1));
  }
  const GridFunction phi(T, xs), psi(T, ys);
  const cplx a(1.3, -0.4), b(-0.2, 2.1);
  for (double alpha : {0.0, 1.0, kInf}) {
    const GridFunction lhsB = apply_B(phi.scaled(a) + psi.scaled(b), alpha);
    const GridFunction rhsB = apply_B(phi, alpha).scaled(a) + apply_B(psi, alpha).scaled(b);
    CHECK((lhsB - rhsB).norm() < 1e-12 * (1.0 + rhsB.norm()));
    const GridFunction lhsG = apply_G(phi.scaled(a) + psi.scaled(b), alpha);
    const GridFunction rhsG = apply_G(phi, alpha).scaled(a) + apply_G(psi, alpha).scaled(b);
    CHECK((lhsG - rhsG).norm() < 1e-12 * (1.0 + rhsG.norm()));
  }
}

TEST_CASE("B preserves decay at the grid tail") {
  const GridFunction phi = expdec(1.0, 40.0, 1024);
  for (double alpha : {0.0, 1.0, kInf}) {
    const GridFunction out = apply_B(phi, alpha);
    for (int j = phi.size() - 16; j < phi.size(); ++j)
      CHECK(std::abs(out[j]) <= 2.0 * std::abs(phi[j]) + 1e-300);
  }
}

TEST_CASE("compose: empty product is the identity") {
  const GridFunction phi = expdec(1.0, 20.0, 256);
  MultiplicityData mult;
  const GridFunction out = compose(phi, mult, OperatorFamily::B);
  CHECK((out - phi).norm() == 0.0);
}

TEST_CASE("compose: single factors match the direct operators") {
  const GridFunction phi = expdec(1.0, 20.0, 256);
  MultiplicityData mult;
  mult.alphas = {0.0};
  mult.m_prime = {1};
  mult.m_dblprime = {0};
  const GridFunction viaG = compose(phi, mult, OperatorFamily::G);
  CHECK((viaG - apply_G(phi, 0.0)).norm() == 0.0);
  // the B family reads the double-primed exponents
  const GridFunction viaB = compose(phi, mult, OperatorFamily::B);
  CHECK((viaB - phi).norm() == 0.0);
  mult.m_dblprime = {1};
  const GridFunction viaB1 = compose(phi, mult, OperatorFamily::B);
  CHECK((viaB1 - apply_B(phi, 0.0)).norm() == 0.0);
}

TEST_CASE("compose: B_inf twice on the unit exponential") {
  // e^{-t} is an eigenfunction: B_inf e^{-t} = (i/2) e^{-t}, so the square
  // gives (i/2)^2 e^{-t} = -e^{-t}/4
  MultiplicityData mult;
  mult.m_inf_dblprime = 2;
  const GridFunction out = compose(expdec(1.0), mult, OperatorFamily::B);
  CHECK(max_abs_gap(out, [](double t) { return -0.25 * std::exp(-t); }) < 1e-8);
}

TEST_CASE("compose rejects runaway multiplicities") {
  MultiplicityData mult;
  mult.m_inf_dblprime = 5;
  CHECK_THROWS_AS((void)compose(expdec(1.0, 20.0, 64), mult, OperatorFamily::B),
                  std::invalid_argument);
  MultiplicityData skewed;
  skewed.alphas = {0.0, 1.0};
  skewed.m_prime = {1};  // must align with alphas
  skewed.m_dblprime = {0, 0};
  CHECK_THROWS_AS((void)compose(expdec(1.0, 20.0, 64), skewed, OperatorFamily::G),
                  std::invalid_argument);
}

TEST_CASE("B_inf inversion recovers known preimages") {
  SUBCASE("f = (i/2) e^{-t}") {
    const GridFunction f = GridFunction::sample(
        40.0, 2048, [](double t) { return cplx(0.0, 0.5 * std::exp(-t)); });
    const MembershipVerdict v = invert_B_inf(f);
    CHECK(v.belongs);
    REQUIRE(v.recovered_preimage.has_value());
    CHECK(max_abs_gap(*v.recovered_preimage, [](double t) { return std::exp(-t); }) <
          1e-7);
  }
  SUBCASE("f = 0") {
    const GridFunction f(10.0, std::vector<cplx>(64, 0.0));
    const MembershipVerdict v = invert_B_inf(f);
    CHECK(v.belongs);
    CHECK(v.preimage_norm == 0.0);
  }
  SUBCASE("f = e^{-2t} with forward check") {
    const GridFunction f = expdec(2.0);
    const MembershipVerdict v = invert_B_inf(f);
    CHECK(v.belongs);
    REQUIRE(v.recovered_preimage.has_value());
    // i (f' - f) = -3i e^{-2t}
    CHECK(max_abs_gap(*v.recovered_preimage,
                      [](double t) { return cplx(0.0, -3.0 * std::exp(-2.0 * t)); }) <
          2e-6);
    // forward: B_inf of the preimage reproduces f
    const GridFunction back = apply_B(*v.recovered_preimage, kInf);
    CHECK(rel_gap(back, f) < 1e-7);
  }
}

TEST_CASE("round trip through B_inf at tight tolerance") {
  const double T = 40.0;
  const int n = 2048;
  const auto cases = {
      GridFunction::sample(T, n, [](double t) { return std::exp(-t); }),
      GridFunction::sample(T, n, [](double t) { return std::exp(-2.0 * t); }),
      GridFunction::sample(T, n, [](double t) { return t * std::exp(-t); }),
  };
  for (const GridFunction& phi : cases) {
    const MembershipVerdict v = invert_B_inf(apply_B(phi, kInf));
    REQUIRE(v.belongs);
    CHECK(rel_gap(*v.recovered_preimage, phi) <= 1e-6);
  }
}

TEST_CASE("noise is detected and rejected") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> noisy(1024);
  for (auto& x : noisy) x = u(rng);
  const GridFunction f(40.0, std::move(noisy));
  const MembershipVerdict v = invert_B_inf(f);
  CHECK_FALSE(v.belongs);
  CHECK_THROWS_AS((void)ebar_norm(f), NotInSpace);
}

TEST_CASE("image-space norms") {
  // || B_inf^{-1} (i/2) e^{-t} || = || e^{-t} || = 1/sqrt(2)
  const GridFunction f1 = GridFunction::sample(
      40.0, 2048, [](double t) { return cplx(0.0, 0.5 * std::exp(-t)); });
  CHECK(ebar_norm(f1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));

  const GridFunction f0(10.0, std::vector<cplx>(64, 0.0));
  CHECK(ebar_norm(f0) == 0.0);

  // || -3i e^{-2t} || = 3 / 2
  CHECK(ebar_norm(expdec(2.0)) == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("grid csv round trip") {
  const GridFunction f = GridFunction::sample(
      5.0, 32, [](double t) { return cplx(std::exp(-t), -0.5 * t); });
  std::ostringstream os;
  write_grid_csv(os, f);
  std::istringstream is(os.str());
  const GridFunction g = read_grid_csv(is);
  REQUIRE(g.size() == f.size());
  CHECK((g - f).norm() < 1e-12);
}
