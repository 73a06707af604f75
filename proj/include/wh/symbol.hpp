#pragma once

#include <iosfwd>
#include <vector>

#include "wh/kernel.hpp"
#include "wh/types.hpp"

namespace wh {

// Compactified frequency grid lambda = L tan(theta), theta = pi j/n - pi/2
// for j = 1..n-1 with the j = n/2 slot (lambda = 0) left out; the values at
// lambda = 0 and lambda = +-inf ride along as analytic limits.  Doubling n
// nests the interior exactly, and n interior+limit slots in total make up
// "n grid points".
class LambdaGrid {
 public:
  LambdaGrid() = default;  // empty; fill via make()
  static LambdaGrid make(int n, double L = 1.0);

  const std::vector<double>& interior() const { return interior_; }
  bool includes_zero_limit() const { return true; }
  bool includes_infinity() const { return true; }
  double map_parameter() const { return L_; }
  int subdivisions() const { return n_; }
  // index of the first positive interior value; the zero limit slots in
  // just before it on a traversal
  int first_positive_index() const { return n_ / 2 - 1; }
  LambdaGrid refined() const { return make(2 * n_, L_); }

 private:
  int n_ = 0;
  double L_ = 1.0;
  std::vector<double> interior_;
};

enum class SymbolLabel { a, b, c_I, ctilde_II, c_III, d, e, c1, custom };

const char* symbol_label_name(SymbolLabel label);

struct SymbolSamples {
  LambdaGrid grid;
  std::vector<cplx> values;  // one per interior lambda
  cplx value_at_zero{};
  cplx value_at_infinity{};
  SymbolLabel label = SymbolLabel::custom;

  // Traversal from -inf through 0 to +inf; both ends carry the shared
  // infinity value, so the path is closed.
  std::vector<cplx> closed_path() const;
};

// Labels for the case trichotomy plus the separately handled K0 route.
enum class CaseLabel { CaseI, CaseII, CaseIII, AlphaBeta, Unclassified };

const char* case_name(CaseLabel c);

struct WindingResult {
  int index = 0;
  double raw_phase_turns = 0;  // accumulated argument / 2 pi
  double max_phase_step = 0;   // largest single-step argument jump, radians
};

// integral of e^{i lambda t} spec(t) dt; exact rational values for closed
// forms, piecewise-quadratic oscillatory quadrature for tabulated data.
SymbolSamples fourier_transform(const KernelSpec& spec, const LambdaGrid& grid,
                                double tol = 1e-3);
cplx fourier_transform_at(const KernelSpec& spec, double lambda, double tol = 1e-3);

// b(lambda) = nu0 - transform of the sign-flipped kernel; b(0) = 0 and
// b(+-inf) = nu0 are set from the analytic limits.
SymbolSamples eval_b(const KernelSpec& k1, const MomentSet& moments,
                     const LambdaGrid& grid, double tol = 1e-3);

// a(lambda) = (i/lambda) b(lambda); a(0) = nu1 (the removable limit), a -> 0
// at infinity.
SymbolSamples eval_a(const SymbolSamples& b, const MomentSet& moments);

// d(lambda) = nu0(K0) - transform of K0; d(0) = 0, d(+-inf) = nu0(K0).
SymbolSamples eval_d(const KernelSpec& k0, const MomentSet& moments,
                     const LambdaGrid& grid, double tol = 1e-3);

// The non-degenerate factor of each case: [1 + i/lambda] b, [1 - i/lambda] b,
// [1 + 1/lambda^2] b, or [1 + 1/lambda^2] d, with the limit values at 0 and
// infinity filled in from the moments.
SymbolSamples eval_regular_factor(CaseLabel c, const SymbolSamples& b_or_d,
                                  const MomentSet& moments, double zero_band = 1e-9);

// c1 = i [1 + i/lambda] b, the factor carrying the index in the nu1 != 0
// cases: a(lambda) = c1(lambda)/(lambda + i).
SymbolSamples eval_c1(const SymbolSamples& b, const MomentSet& moments);

SymbolSamples scale_samples(const SymbolSamples& s, cplx factor, SymbolLabel label);

// Multiply by the rational factor (lambda+i)/(lambda-i) or its reciprocal.
enum class BlaschkeOrientation { PlusOverMinus, MinusOverPlus };
SymbolSamples multiply_blaschke(const SymbolSamples& s, BlaschkeOrientation o);
cplx blaschke_at(double lambda, BlaschkeOrientation o);

// Re s(lambda) > 0 for every interior lambda.
ConditionVerdict check_arg_halfplane(const SymbolSamples& s, double rel_tol = 1e-12);

// Winding of the closed traversal, oriented so (lambda-i)/(lambda+i) gets +1.
WindingResult winding_index(const SymbolSamples& s, double rel_tol = 1e-9);

// min over interior and limit values of |s|, against rel_tol * |s(inf)|.
ConditionVerdict check_nonvanishing(const SymbolSamples& s, double rel_tol = 1e-9);

// CSV rows (lambda, Re, Im, unwrapped arg) in traversal order.
void write_symbol_csv(std::ostream& os, const SymbolSamples& s);

}  // namespace wh
