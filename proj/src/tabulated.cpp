#include "wh/detail/tabulated.hpp"

#include <algorithm>
#include <cmath>

#include "wh/quadrature.hpp"

namespace wh::detail {
namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

// Least-squares exponential fit over the last decade of samples, anchored at
// the outermost sample.  Returns nothing when the data grows outward or is
// too short to fit.
std::optional<TailFit> fit_tail(const std::vector<double>& u, const std::vector<cplx>& w) {
  const std::size_t n = u.size();
  if (n < 3) return std::nullopt;
  const double edge = u.back();
  const double lo = edge / 10.0;
  std::vector<double> xs, ys;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] < lo) continue;
    const double mag = std::abs(w[i]);
    if (mag > 0.0) {
      all_zero = false;
      xs.push_back(u[i]);
      ys.push_back(std::log(mag));
    }
  }
  if (all_zero) return TailFit{0.0, 1.0, edge};
  if (xs.size() < 3) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double m = double(xs.size());
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (m * sxy - sx * sy) / denom;
  if (slope >= 0.0) return std::nullopt;  // not decaying
  return TailFit{w.back(), -slope, edge};
}

HalfLine make_half(std::vector<double> u, std::vector<cplx> w) {
  HalfLine hl;
  hl.tail = fit_tail(u, w);
  hl.u = std::move(u);
  hl.w = std::move(w);
  return hl;
}

cplx extrapolated_at_zero(const HalfLine& hl) {
  const double u0 = hl.u[0], u1 = hl.u[1];
  return hl.w[0] - (hl.w[1] - hl.w[0]) * (u0 / (u1 - u0));
}

// integral of (c0 + c1 u) u^m e^{-mu u} over [0, len]
cplx linear_segment(cplx c0, cplx c1, double len, int m, cplx mu) {
  if (mu == 0.0) {
    return c0 * std::pow(len, m + 1) / double(m + 1) +
           c1 * std::pow(len, m + 2) / double(m + 2);
  }
  const auto M = exp_monomial_integrals(len, mu);
  return c0 * M[std::size_t(m)] + c1 * M[std::size_t(m + 1)];
}

// integral of the quadratic through (0,v0),(u1,v1),(u2,v2) (local coords)
// times u... the panel lives at global offset t0, weight (t0+u)^m e^{-mu(t0+u)}.
cplx quadratic_panel(double t0, double u1, double u2, cplx v0, cplx v1, cplx v2,
                     int m, cplx mu) {
  const cplx gamma = ((v2 - v0) / u2 - (v1 - v0) / u1) / (u2 - u1);
  const cplx beta = (v1 - v0) / u1 - gamma * u1;
  const cplx alpha = v0;
  if (mu == 0.0) {
    // expand (t0+u)^m, m <= 2
    cplx total = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double cj = binom(m, j) * std::pow(t0, m - j);
      const double p1 = std::pow(u2, j + 1) / double(j + 1);
      const double p2 = std::pow(u2, j + 2) / double(j + 2);
      const double p3 = std::pow(u2, j + 3) / double(j + 3);
      total += cj * (alpha * p1 + beta * p2 + gamma * p3);
    }
    return total;
  }
  const auto M = exp_monomial_integrals(u2, mu);
  return std::exp(-mu * t0) * (alpha * M[0] + beta * M[1] + gamma * M[2]);
}

}  // namespace

HalfLine positive_half(const KernelSpec& spec) {
  const auto& tab = spec.table();
  std::vector<double> u;
  std::vector<cplx> w;
  for (std::size_t i = 0; i < tab.t.size(); ++i) {
    if (tab.t[i] >= 0.0) {
      u.push_back(tab.t[i]);
      w.push_back(tab.v[i]);
    }
  }
  return make_half(std::move(u), std::move(w));
}

HalfLine negative_half(const KernelSpec& spec) {
  const auto& tab = spec.table();
  std::vector<double> u;
  std::vector<cplx> w;
  for (std::size_t i = tab.t.size(); i-- > 0;) {
    if (tab.t[i] < 0.0) {
      u.push_back(-tab.t[i]);
      w.push_back(tab.v[i]);
    }
  }
  return make_half(std::move(u), std::move(w));
}

Integral half_line_integral(const HalfLine& hl, int m, cplx mu) {
  const std::size_t n = hl.u.size();
  if (n < 4) throw MomentDiverges("tabulated half-line has too few samples");
  if (!hl.tail) throw MomentDiverges("tabulated tail does not decay");

  Integral out;

  // [0, u0] with the first two samples extended linearly to 0
  const double u0 = hl.u[0];
  if (u0 > 0.0) {
    const cplx w00 = extrapolated_at_zero(hl);
    const cplx slope = (hl.w[0] - w00) / u0;
    out.value += linear_segment(w00, slope, u0, m, mu);
    // extension risk scales with the local curvature, not the slope
    const double h01 = hl.u[1] - hl.u[0];
    const double curvature = std::abs(hl.w[2] - 2.0 * hl.w[1] + hl.w[0]) / (h01 * h01);
    out.error += 0.5 * u0 * u0 * u0 * curvature;
  }

  // quadratic panels over sample pairs; a trailing odd interval goes linear
  std::size_t i = 0;
  while (i + 2 < n) {
    const double t0 = hl.u[i];
    const double u1 = hl.u[i + 1] - t0, u2 = hl.u[i + 2] - t0;
    out.value += quadratic_panel(t0, u1, u2, hl.w[i], hl.w[i + 1], hl.w[i + 2], m, mu);
    i += 2;
  }
  if (i + 1 < n) {
    const double t0 = hl.u[i];
    const double len = hl.u[i + 1] - t0;
    const cplx c0 = hl.w[i];
    const cplx c1 = (hl.w[i + 1] - hl.w[i]) / len;
    if (mu == 0.0) {
      cplx total = 0.0;
      for (int j = 0; j <= m; ++j) {
        const double cj = binom(m, j) * std::pow(t0, m - j);
        total += cj * (c0 * std::pow(len, j + 1) / double(j + 1) +
                       c1 * std::pow(len, j + 2) / double(j + 2));
      }
      out.value += total;
    } else {
      out.value += std::exp(-mu * t0) * linear_segment(c0, c1, len, 0, mu);
    }
  }

  // fitted tail beyond the data
  const TailFit& tail = *hl.tail;
  const double edge = tail.edge;
  cplx tail_value = 0.0;
  if (tail.c != 0.0) {
    const cplx rate = tail.a + mu;
    cplx sum = 0.0;
    for (int j = 0; j <= m; ++j)
      sum += binom(m, j) * std::pow(edge, m - j) * factorial(j) / std::pow(rate, j + 1);
    tail_value = tail.c * std::exp(-mu * edge) * sum;
  }
  out.value += tail_value;
  out.error += 0.05 * std::abs(tail_value);  // tail model risk

  // quartic-difference proxy for the interpolation error of the panels
  double mean_h = (hl.u.back() - hl.u.front()) / double(n - 1);
  double d4sum = 0.0;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const cplx d4 =
        hl.w[k - 2] - 4.0 * hl.w[k - 1] + 6.0 * hl.w[k] - 4.0 * hl.w[k + 1] + hl.w[k + 2];
    d4sum += std::abs(d4);
  }
  double scale_m = std::pow(std::max(1.0, hl.u.back()), m);
  out.error += mean_h / 180.0 * d4sum * scale_m;
  return out;
}

double half_line_abs_integral(const HalfLine& hl, int m) {
  HalfLine mag = hl;
  for (auto& x : mag.w) x = std::abs(x);
  if (mag.tail) mag.tail->c = std::abs(mag.tail->c);
  return half_line_integral(mag, m, 0.0).value.real();
}

}  // namespace wh::detail
