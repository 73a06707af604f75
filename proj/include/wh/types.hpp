#pragma once

#include <complex>
#include <numbers>

namespace wh {

using cplx = std::complex<double>;

inline constexpr cplx kImag{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

}  // namespace wh
