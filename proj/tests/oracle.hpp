#pragma once

// Test-only oracles.  The adaptive Simpson integrator here is deliberately
// independent of the library's quadrature paths: it sees kernels only as
// black-box functions of t.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "wh/kernel.hpp"

namespace oracle {

using wh::cplx;

inline cplx simpson(const std::function<cplx(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline cplx adaptive_step(const std::function<cplx(double)>& f, double a, double b,
                          cplx whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const cplx left = simpson(f, a, m);
  const cplx right = simpson(f, m, b);
  const cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, left, tol / 2.0, depth - 1) +
         adaptive_step(f, m, b, right, tol / 2.0, depth - 1);
}

inline cplx integrate(const std::function<cplx(double)>& f, double a, double b,
                      double tol = 1e-12) {
  // seed with uniform panels so narrow features cannot hide from the
  // first Simpson estimate
  const int panels = 64;
  const double h = (b - a) / panels;
  cplx total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, hi = a + (p + 1) * h;
    total += adaptive_step(f, lo, hi, simpson(f, lo, hi), tol / panels, 40);
  }
  return total;
}

// integral over the whole line with exponentially decaying tails truncated
// where they are below double precision
inline cplx integrate_line(const std::function<cplx(double)>& f, double cut = 80.0,
                           double tol = 1e-12) {
  return integrate(f, -cut, 0.0, tol) + integrate(f, 0.0, cut, tol);
}

// The exponential family used throughout: K1(t) = e^{-t} on t > 0 and
// gamma e^{t} on t < 0.
inline wh::KernelSpec gamma_family(double gamma) {
  std::vector<wh::ExpPolyTerm> neg;
  if (gamma != 0.0) neg.push_back({gamma, 0, 1.0});
  return wh::KernelSpec::closed_form(wh::KernelLevel::K1, {{1.0, 0, 1.0}},
                                     std::move(neg));
}

// b(lambda) = (1-gamma) - 1/(1-i lambda) + gamma/(1+i lambda)
inline cplx gamma_family_b(double gamma, double lambda) {
  const cplx i(0.0, 1.0);
  return (1.0 - gamma) - 1.0 / (1.0 - i * lambda) + gamma / (1.0 + i * lambda);
}

// K0 = 1/2 e^{-|t|}
inline wh::KernelSpec even_exp_k0() {
  return wh::KernelSpec::closed_form(wh::KernelLevel::K0, {{0.5, 0, 1.0}},
                                     {{0.5, 0, 1.0}});
}

// Randomized admissible kernels: positive exp-polynomial terms on t > 0
// mirrored with a factor gamma in [-0.9, 0.9], so the difference condition
// holds with margin (1-gamma) K1(t).
inline wh::KernelSpec random_admissible(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_terms(1, 3), power(0, 2);
  std::uniform_real_distribution<double> coeff(0.2, 2.0), rate(0.5, 3.0),
      mirror(-0.9, 0.9);
  std::vector<wh::ExpPolyTerm> pos, neg;
  const double gamma = mirror(rng);
  const int n = n_terms(rng);
  for (int j = 0; j < n; ++j) {
    const wh::ExpPolyTerm term{coeff(rng), power(rng), rate(rng)};
    pos.push_back(term);
    neg.push_back({gamma * term.c, term.k, term.a});
  }
  return wh::KernelSpec::closed_form(wh::KernelLevel::K1, std::move(pos),
                                     std::move(neg));
}

}  // namespace oracle
