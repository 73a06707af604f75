#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wh/errors.hpp"
#include "wh/types.hpp"

namespace wh {

enum class QuadRule { Trapezoid, Simpson };

// Samples of a half-line function on the uniform grid t_j = j T/(n-1) over
// [0, T], with the quadrature rule its norms and inner integrals use.
class GridFunction {
 public:
  GridFunction(double T, std::vector<cplx> samples, QuadRule rule = QuadRule::Trapezoid);
  static GridFunction sample(double T, int n, const std::function<cplx(double)>& f,
                             QuadRule rule = QuadRule::Trapezoid);

  double T() const { return T_; }
  int size() const { return int(samples_.size()); }
  double step() const { return T_ / double(samples_.size() - 1); }
  double t(int j) const { return step() * j; }
  const std::vector<cplx>& samples() const { return samples_; }
  cplx operator[](int j) const { return samples_[std::size_t(j)]; }
  QuadRule quadrature() const { return rule_; }

  // discrete L2 norm over [0, T]
  double norm() const;

  // 4th-order finite-difference derivative; stride > 1 reads every stride-th
  // sample, emulating a coarser grid on the same abscissas
  GridFunction derivative(int stride = 1) const;

  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;
  GridFunction scaled(cplx factor) const;

 private:
  double T_;
  std::vector<cplx> samples_;
  QuadRule rule_;
};

// (B_a phi)(t) = phi(t) - (1+ia) e^t int_t^inf e^{-s} phi(s) ds, truncated at
// T with a zero tail; alpha = infinity selects (B_inf phi)(t) = i e^t int...
GridFunction apply_B(const GridFunction& phi, double alpha);

// (G_a phi)(t) = phi(t) + (1-ia) e^{-iat} int_0^t e^{ias} phi(s) ds;
// alpha = infinity selects G_inf f = i [f + f'].
GridFunction apply_G(const GridFunction& phi, double alpha);

// Zero multiplicities per factor; m_prime/m_dblprime[j] pair with alphas[j].
struct MultiplicityData {
  std::vector<double> alphas;
  std::vector<int> m_prime;
  std::vector<int> m_dblprime;
  int m_inf_prime = 0;
  int m_inf_dblprime = 0;
};

enum class OperatorFamily { B, G };

// B = B_inf^{m_inf''} prod_j B_{alpha_j}^{m_j''} applied left to right;
// G uses the primed multiplicities.  Multiplicities are capped at 4.
GridFunction compose(const GridFunction& phi, const MultiplicityData& mult,
                     OperatorFamily family);

struct MembershipVerdict {
  std::string space;
  bool belongs = false;
  std::optional<GridFunction> recovered_preimage;
  double preimage_norm = 0;
};

// Membership in the B_inf image via the derived inverse phi = i (f' - f);
// decided by a coarse-stencil noise test on the recovered preimage.
MembershipVerdict invert_B_inf(const GridFunction& f);

// ||B_inf^{-1} f|| in the discrete L2 norm; throws NotInSpace when the
// membership test fails.
double ebar_norm(const GridFunction& f);

// CSV (t, value) with complex values written as "re+imi".
void write_grid_csv(std::ostream& os, const GridFunction& f);
GridFunction read_grid_csv(std::istream& is, QuadRule rule = QuadRule::Trapezoid);

}  // namespace wh
