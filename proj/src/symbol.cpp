#include "wh/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "wh/detail/tabulated.hpp"

namespace wh {
namespace {

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

// transform of one half-line: sum_k c k! / (a -+ i lambda)^{k+1}
cplx closed_form_transform(const std::vector<ExpPolyTerm>& pos,
                           const std::vector<ExpPolyTerm>& neg, double lambda) {
  cplx v = 0.0;
  for (const auto& term : pos)
    v += term.c * factorial(term.k) / std::pow(cplx(term.a, -lambda), term.k + 1);
  for (const auto& term : neg)
    v += term.c * factorial(term.k) / std::pow(cplx(term.a, lambda), term.k + 1);
  return v;
}

struct TabulatedTransform {
  detail::HalfLine pos, neg;
  double scale;
  explicit TabulatedTransform(const KernelSpec& spec)
      : pos(detail::positive_half(spec)), neg(detail::negative_half(spec)) {
    scale = std::max(1.0, detail::half_line_abs_integral(pos, 0) +
                              detail::half_line_abs_integral(neg, 0));
  }
  cplx at(double lambda, double tol) const {
    // e^{i lambda t} on t > 0 is weight mu = -i lambda; the mirrored
    // negative side picks up the conjugate weight
    const auto ip = detail::half_line_integral(pos, 0, cplx(0.0, -lambda));
    const auto in = detail::half_line_integral(neg, 0, cplx(0.0, lambda));
    if (ip.error + in.error > tol * scale)
      throw UnresolvedOscillation("tabulated transform error estimate above tolerance");
    return ip.value + in.value;
  }
};

}  // namespace

LambdaGrid LambdaGrid::make(int n, double L) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("lambda grid needs an even subdivision count >= 8");
  if (!(L > 0.0)) throw std::invalid_argument("map parameter must be positive");
  LambdaGrid grid;
  grid.n_ = n;
  grid.L_ = L;
  grid.interior_.reserve(std::size_t(n - 2));
  // build the positive half and mirror it, so the grid is symmetric to the
  // last bit; j/n and (2j)/(2n) round identically, which nests refinements
  std::vector<double> upper;
  for (int j = n / 2 + 1; j < n; ++j) {
    const double theta = kPi * (double(j) / double(n)) - kPi / 2.0;
    upper.push_back(L * std::tan(theta));
  }
  for (std::size_t k = upper.size(); k-- > 0;) grid.interior_.push_back(-upper[k]);
  grid.interior_.insert(grid.interior_.end(), upper.begin(), upper.end());
  return grid;
}

const char* symbol_label_name(SymbolLabel label) {
  switch (label) {
    case SymbolLabel::a: return "a";
    case SymbolLabel::b: return "b";
    case SymbolLabel::c_I: return "c";
    case SymbolLabel::ctilde_II: return "c_tilde";
    case SymbolLabel::c_III: return "c";
    case SymbolLabel::d: return "d";
    case SymbolLabel::e: return "e";
    case SymbolLabel::c1: return "c1";
    case SymbolLabel::custom: return "custom";
  }
  return "?";
}

const char* case_name(CaseLabel c) {
  switch (c) {
    case CaseLabel::CaseI: return "CaseI";
    case CaseLabel::CaseII: return "CaseII";
    case CaseLabel::CaseIII: return "CaseIII";
    case CaseLabel::AlphaBeta: return "AlphaBeta";
    case CaseLabel::Unclassified: return "Unclassified";
  }
  return "?";
}

std::vector<cplx> SymbolSamples::closed_path() const {
  std::vector<cplx> path;
  path.reserve(values.size() + 3);
  path.push_back(value_at_infinity);
  const std::size_t fp = std::size_t(grid.first_positive_index());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k == fp) path.push_back(value_at_zero);
    path.push_back(values[k]);
  }
  path.push_back(value_at_infinity);
  return path;
}

cplx fourier_transform_at(const KernelSpec& spec, double lambda, double tol) {
  if (spec.is_closed_form())
    return closed_form_transform(spec.pos_terms(), spec.neg_terms(), lambda);
  return TabulatedTransform(spec).at(lambda, tol);
}

SymbolSamples fourier_transform(const KernelSpec& spec, const LambdaGrid& grid,
                                double tol) {
  SymbolSamples s;
  s.grid = grid;
  s.label = SymbolLabel::custom;
  s.values.reserve(grid.interior().size());
  if (spec.is_closed_form()) {
    for (const double lambda : grid.interior())
      s.values.push_back(closed_form_transform(spec.pos_terms(), spec.neg_terms(), lambda));
    s.value_at_zero = closed_form_transform(spec.pos_terms(), spec.neg_terms(), 0.0);
  } else {
    TabulatedTransform tt(spec);
    for (const double lambda : grid.interior()) s.values.push_back(tt.at(lambda, tol));
    s.value_at_zero = tt.at(0.0, tol);
  }
  s.value_at_infinity = 0.0;
  return s;
}

SymbolSamples eval_b(const KernelSpec& k1, const MomentSet& moments,
                     const LambdaGrid& grid, double tol) {
  if (k1.level() != KernelLevel::K1)
    throw std::invalid_argument("eval_b expects a K1-level spec");
  if (moments.subject != MomentSubject::TildeK1)
    throw std::invalid_argument("eval_b expects TildeK1 moments");
  SymbolSamples s = fourier_transform(tilde_of(k1), grid, tol);
  for (auto& v : s.values) v = moments.nu0 - v;
  s.value_at_zero = 0.0;  // nu0 - nu0, exactly
  s.value_at_infinity = moments.nu0;
  s.label = SymbolLabel::b;
  return s;
}

SymbolSamples eval_a(const SymbolSamples& b, const MomentSet& moments) {
  if (b.label != SymbolLabel::b) throw std::invalid_argument("eval_a expects b samples");
  SymbolSamples s = b;
  const auto& lambdas = b.grid.interior();
  for (std::size_t k = 0; k < s.values.size(); ++k)
    s.values[k] = kImag / lambdas[k] * b.values[k];
  s.value_at_zero = moments.nu1;  // removable limit of (i/lambda) b
  s.value_at_infinity = 0.0;      // b bounded, 1/lambda -> 0
  s.label = SymbolLabel::a;
  return s;
}

SymbolSamples eval_d(const KernelSpec& k0, const MomentSet& moments,
                     const LambdaGrid& grid, double tol) {
  if (k0.level() != KernelLevel::K0)
    throw std::invalid_argument("eval_d expects a K0-level spec");
  if (moments.subject != MomentSubject::K0)
    throw std::invalid_argument("eval_d expects K0 moments");
  SymbolSamples s = fourier_transform(k0, grid, tol);
  for (auto& v : s.values) v = moments.nu0 - v;
  s.value_at_zero = 0.0;
  s.value_at_infinity = moments.nu0;
  s.label = SymbolLabel::d;
  return s;
}

SymbolSamples eval_regular_factor(CaseLabel c, const SymbolSamples& b_or_d,
                                  const MomentSet& moments, double zero_band) {
  const double band = zero_band * std::max(1.0, std::abs(moments.nu0));
  SymbolSamples s = b_or_d;
  const auto& lambdas = b_or_d.grid.interior();
  switch (c) {
    case CaseLabel::CaseI:
      if (b_or_d.label != SymbolLabel::b || moments.subject != MomentSubject::TildeK1)
        throw CaseMismatch("case I factor is built from b");
      if (!(moments.nu1 > band)) throw CaseMismatch("case I requires nu1 > 0");
      for (std::size_t k = 0; k < s.values.size(); ++k)
        s.values[k] = (1.0 + kImag / lambdas[k]) * b_or_d.values[k];
      s.value_at_zero = moments.nu1;
      s.label = SymbolLabel::c_I;
      break;
    case CaseLabel::CaseII:
      if (b_or_d.label != SymbolLabel::b || moments.subject != MomentSubject::TildeK1)
        throw CaseMismatch("case II factor is built from b");
      if (!(moments.nu1 < -band)) throw CaseMismatch("case II requires nu1 < 0");
      for (std::size_t k = 0; k < s.values.size(); ++k)
        s.values[k] = (1.0 - kImag / lambdas[k]) * b_or_d.values[k];
      s.value_at_zero = -moments.nu1;
      s.label = SymbolLabel::ctilde_II;
      break;
    case CaseLabel::CaseIII:
      if (b_or_d.label != SymbolLabel::b || moments.subject != MomentSubject::TildeK1)
        throw CaseMismatch("case III factor is built from b");
      if (!(std::abs(moments.nu1) <= band))
        throw CaseMismatch("case III requires nu1 = 0");
      if (!moments.nu2_finite || !(moments.nu2 > band))
        throw CaseMismatch("case III requires finite nu2 > 0");
      for (std::size_t k = 0; k < s.values.size(); ++k)
        s.values[k] = (1.0 + 1.0 / (lambdas[k] * lambdas[k])) * b_or_d.values[k];
      s.value_at_zero = 0.5 * moments.nu2;
      s.label = SymbolLabel::c_III;
      break;
    case CaseLabel::AlphaBeta:
      if (b_or_d.label != SymbolLabel::d || moments.subject != MomentSubject::K0)
        throw CaseMismatch("alpha-beta factor is built from d");
      if (!(std::abs(moments.nu1) <= band) || !(moments.nu0 > band) ||
          !(moments.nu2 > band))
        throw CaseMismatch("alpha-beta moment balance violated");
      for (std::size_t k = 0; k < s.values.size(); ++k)
        s.values[k] = (1.0 + 1.0 / (lambdas[k] * lambdas[k])) * b_or_d.values[k];
      s.value_at_zero = 0.5 * moments.nu2;
      s.label = SymbolLabel::e;
      break;
    case CaseLabel::Unclassified:
      throw CaseMismatch("no regular factor for an unclassified kernel");
  }
  s.value_at_infinity = moments.nu0;
  return s;
}

SymbolSamples eval_c1(const SymbolSamples& b, const MomentSet& moments) {
  if (b.label != SymbolLabel::b)
    throw std::invalid_argument("eval_c1 expects b samples");
  if (moments.subject != MomentSubject::TildeK1)
    throw std::invalid_argument("eval_c1 expects TildeK1 moments");
  SymbolSamples s = b;
  const auto& lambdas = b.grid.interior();
  for (std::size_t k = 0; k < s.values.size(); ++k)
    s.values[k] = kImag * (1.0 + kImag / lambdas[k]) * b.values[k];
  s.value_at_zero = kImag * moments.nu1;  // limit of (1 + i/lambda) b is nu1
  s.value_at_infinity = kImag * moments.nu0;
  s.label = SymbolLabel::c1;
  return s;
}

SymbolSamples scale_samples(const SymbolSamples& s, cplx factor, SymbolLabel label) {
  SymbolSamples out = s;
  for (auto& v : out.values) v *= factor;
  out.value_at_zero *= factor;
  out.value_at_infinity *= factor;
  out.label = label;
  return out;
}

cplx blaschke_at(double lambda, BlaschkeOrientation o) {
  const cplx num(lambda, o == BlaschkeOrientation::PlusOverMinus ? 1.0 : -1.0);
  const cplx den(lambda, o == BlaschkeOrientation::PlusOverMinus ? -1.0 : 1.0);
  return num / den;
}

SymbolSamples multiply_blaschke(const SymbolSamples& s, BlaschkeOrientation o) {
  SymbolSamples out = s;
  const auto& lambdas = s.grid.interior();
  for (std::size_t k = 0; k < out.values.size(); ++k)
    out.values[k] *= blaschke_at(lambdas[k], o);
  out.value_at_zero *= -1.0;  // (i)/(-i) = (-i)/(i) = -1 at lambda = 0
  // (lambda +- i)/(lambda -+ i) -> 1 at +-inf: infinity value unchanged
  out.label = SymbolLabel::custom;
  return out;
}

ConditionVerdict check_arg_halfplane(const SymbolSamples& s, double rel_tol) {
  if (s.values.empty()) throw std::invalid_argument("empty symbol samples");
  double min_re = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  double witness = 0.0;
  const auto& lambdas = s.grid.interior();
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    scale = std::max(scale, std::abs(s.values[k]));
    if (s.values[k].real() < min_re) {
      min_re = s.values[k].real();
      witness = lambdas[k];
    }
  }
  ConditionVerdict v;
  v.condition_id = ConditionId::SymbolHalfPlane;
  v.margin = min_re;
  v.witness = witness;
  v.tolerance = rel_tol * std::max(1.0, scale);
  v.holds = min_re > v.tolerance;
  return v;
}

WindingResult winding_index(const SymbolSamples& s, double rel_tol) {
  const std::vector<cplx> path = s.closed_path();
  const double floor = rel_tol * std::abs(s.value_at_infinity);
  for (const cplx& v : path)
    if (!(std::abs(v) > floor))
      throw VanishingSymbol("symbol vanishes on the traversal");
  double total = 0.0, max_step = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double step = std::arg(path[k + 1] / path[k]);
    total += step;
    max_step = std::max(max_step, std::abs(step));
  }
  if (max_step >= kPi / 2.0)
    throw UnderResolved("winding traversal under-resolved (phase step >= pi/2)");
  WindingResult w;
  w.raw_phase_turns = total / (2.0 * kPi);
  w.index = int(std::lround(w.raw_phase_turns));
  w.max_phase_step = max_step;
  return w;
}

ConditionVerdict check_nonvanishing(const SymbolSamples& s, double rel_tol) {
  double min_abs = std::min(std::abs(s.value_at_zero), std::abs(s.value_at_infinity));
  std::optional<double> witness;
  const auto& lambdas = s.grid.interior();
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const double m = std::abs(s.values[k]);
    if (m < min_abs) {
      min_abs = m;
      witness = lambdas[k];
    }
  }
  ConditionVerdict v;
  v.condition_id = ConditionId::SymbolNonVanishing;
  v.margin = min_abs;
  v.witness = witness;
  v.tolerance = rel_tol * std::abs(s.value_at_infinity);
  v.holds = min_abs > v.tolerance;
  return v;
}

void write_symbol_csv(std::ostream& os, const SymbolSamples& s) {
  os << "lambda,re,im,arg_unwrapped\n";
  const std::vector<cplx> path = s.closed_path();
  std::vector<double> lambdas;
  lambdas.reserve(path.size());
  lambdas.push_back(-std::numeric_limits<double>::infinity());
  const std::size_t fp = std::size_t(s.grid.first_positive_index());
  const auto& interior = s.grid.interior();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    if (k == fp) lambdas.push_back(0.0);
    lambdas.push_back(interior[k]);
  }
  lambdas.push_back(std::numeric_limits<double>::infinity());

  double unwrapped = std::arg(path.front());
  os.precision(17);
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k > 0) unwrapped += std::arg(path[k] / path[k - 1]);
    if (std::isinf(lambdas[k]))
      os << (lambdas[k] < 0 ? "-inf" : "inf");
    else
      os << lambdas[k];
    os << ',' << path[k].real() << ',' << path[k].imag() << ',' << unwrapped << '\n';
  }
}

}  // namespace wh
