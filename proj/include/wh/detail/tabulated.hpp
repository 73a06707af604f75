#pragma once

#include <optional>
#include <vector>

#include "wh/kernel.hpp"
#include "wh/types.hpp"

namespace wh::detail {

// One half-line of a tabulated kernel, mapped to u >= 0 with u increasing.
// The negative half-line is mirrored (u = -t), so every integral below is
// an integral over (0, inf).
struct HalfLine {
  std::vector<double> u;
  std::vector<cplx> w;
  std::optional<TailFit> tail;  // beyond u.back(); absent if not decaying
};

HalfLine positive_half(const KernelSpec& spec);
HalfLine negative_half(const KernelSpec& spec);

struct Integral {
  cplx value{};
  double error = 0;
};

// integral of u^m e^{-mu u} w(u) du over (0, inf).  Piecewise-quadratic
// panels over the samples, a linear extension over [0, u.front()), and the
// fitted exponential tail beyond u.back().  Supports the two shapes the
// callers need: mu = 0 with m <= 2 (moments) and m = 0 with complex mu
// (transforms).  Throws MomentDiverges when the tail model is absent.
Integral half_line_integral(const HalfLine& hl, int m, cplx mu);

// Same integral of |w| with m = 0, mu = 0 (scale estimates).
double half_line_abs_integral(const HalfLine& hl, int m);

}  // namespace wh::detail
