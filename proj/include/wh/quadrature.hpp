#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "wh/types.hpp"

namespace wh {

// Moments of the exponential weight on one step:
//   M_m(h, mu) = integral of u^m exp(-mu u) du over [0, h],  m = 0..3.
// Upward recurrence M_m = (m M_{m-1} - h^m e^{-mu h}) / mu, with a series
// fallback when |mu h| is too small for the recurrence to be well posed.
inline std::array<cplx, 4> exp_monomial_integrals(double h, cplx mu) {
  std::array<cplx, 4> M{};
  const cplx z = mu * h;
  if (std::abs(z) < 1e-3) {
    // M_m = h^{m+1} sum_p (-z)^p / (p! (m+p+1))
    double hp = h;
    for (int m = 0; m < 4; ++m) {
      cplx sum = 0.0, term = 1.0;
      for (int p = 0; p < 12; ++p) {
        sum += term / double(m + p + 1);
        term *= -z / double(p + 1);
      }
      M[std::size_t(m)] = hp * sum;
      hp *= h;
    }
    return M;
  }
  const cplx eh = std::exp(-z);
  M[0] = (1.0 - eh) / mu;
  double hm = h;  // h^m
  for (int m = 1; m < 4; ++m) {
    M[std::size_t(m)] = (double(m) * M[std::size_t(m - 1)] - hm * eh) / mu;
    hm *= h;
  }
  return M;
}

// Monomial coefficients of the cubic through four equally spaced samples.
// The samples g0..g3 sit at u = (s)h, (s+1)h, (s+2)h, (s+3)h; the returned
// c[] satisfy p(u) = c0 + c1 u + c2 u^2 + c3 u^3 with p interpolating the
// samples.  s is the stencil offset relative to u = 0 (-1 for a centred
// stencil, 0 / -2 at the ends of a grid).
inline std::array<cplx, 4> cubic_coeffs(const cplx* g, double h, int s) {
  const cplx d1 = g[1] - g[0];
  const cplx d2 = g[2] - 2.0 * g[1] + g[0];
  const cplx d3 = g[3] - 3.0 * g[2] + 3.0 * g[1] - g[0];
  // Newton form in y = u/h - s.
  const std::array<cplx, 4> b = {g[0], d1 - d2 / 2.0 + d3 / 3.0, d2 / 2.0 - d3 / 2.0,
                                 d3 / 6.0};
  // Expand (y)^m = (x - s)^m into powers of x = u/h.
  std::array<cplx, 4> a{};
  const double ms = double(-s);
  a[0] = b[0] + b[1] * ms + b[2] * ms * ms + b[3] * ms * ms * ms;
  a[1] = b[1] + 2.0 * b[2] * ms + 3.0 * b[3] * ms * ms;
  a[2] = b[2] + 3.0 * b[3] * ms;
  a[3] = b[3];
  std::array<cplx, 4> c{};
  double hk = 1.0;
  for (int k = 0; k < 4; ++k) {
    c[std::size_t(k)] = a[std::size_t(k)] / hk;
    hk *= h;
  }
  return c;
}

}  // namespace wh
