#include "wh/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wh/detail/tabulated.hpp"

namespace wh {
namespace {

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

cplx eval_terms(const std::vector<ExpPolyTerm>& terms, double abs_t) {
  cplx v = 0.0;
  for (const auto& term : terms)
    v += term.c * std::pow(abs_t, term.k) * std::exp(-term.a * abs_t);
  return v;
}

// integral of u^m * c u^k e^{-a u} over (0, inf), per term
cplx terms_moment(const std::vector<ExpPolyTerm>& terms, int m) {
  cplx v = 0.0;
  for (const auto& term : terms)
    v += term.c * factorial(term.k + m) / std::pow(term.a, term.k + m + 1);
  return v;
}

double terms_abs_moment(const std::vector<ExpPolyTerm>& terms, int m) {
  double v = 0.0;
  for (const auto& term : terms)
    v += std::abs(term.c) * factorial(term.k + m) / std::pow(term.a, term.k + m + 1);
  return v;
}

// int_t^inf c tau^k e^{-a tau} dtau = e^{-a t} sum_j c (k!/j!) t^j / a^{k+1-j}
std::vector<ExpPolyTerm> tail_integral_terms(const std::vector<ExpPolyTerm>& terms) {
  std::vector<ExpPolyTerm> out;
  for (const auto& term : terms) {
    for (int j = 0; j <= term.k; ++j) {
      const double scale = factorial(term.k) / factorial(j) /
                           std::pow(term.a, term.k + 1 - j);
      out.push_back({term.c * scale, j, term.a});
    }
  }
  return out;
}

void check_terms(const std::vector<ExpPolyTerm>& terms) {
  for (const auto& term : terms) {
    if (!(term.a > 0.0))
      throw NonIntegrableKernel("closed-form decay rate must be positive");
    if (term.k < 0) throw NonIntegrableKernel("negative polynomial power");
    if (!std::isfinite(term.c.real()) || !std::isfinite(term.c.imag()) ||
        !std::isfinite(term.a))
      throw NonIntegrableKernel("non-finite term");
  }
}

KernelSpec tabulated_tail_integrated(const KernelSpec& spec, KernelLevel out_level) {
  // K(t_i) = int_{t_i}^{inf} for t_i > 0 (trapezoid over the data plus the
  // fitted tail), mirrored on the negative side; a t = 0 sample gets the
  // mean of the two one-sided integrals.
  if (!spec.pos_tail() || !spec.neg_tail())
    throw NonIntegrableKernel("tabulated tails do not decay");
  const auto& tab = spec.table();
  const std::size_t n = tab.t.size();
  std::vector<cplx> out(n);

  auto side = [&](bool positive) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (positive ? tab.t[i] > 0.0 : tab.t[i] < 0.0) idx.push_back(i);
    const TailFit& tail = positive ? *spec.pos_tail() : *spec.neg_tail();
    // walk outward-in accumulating the trapezoid
    cplx acc = tail.c / tail.a;  // integral beyond the outermost sample
    if (positive) {
      for (std::size_t p = idx.size(); p-- > 0;) {
        if (p + 1 < idx.size()) {
          const std::size_t i = idx[p], j = idx[p + 1];
          acc += 0.5 * (tab.v[i] + tab.v[j]) * (tab.t[j] - tab.t[i]);
        }
        out[idx[p]] = acc;
      }
    } else {
      for (std::size_t p = 0; p < idx.size(); ++p) {
        if (p > 0) {
          const std::size_t i = idx[p - 1], j = idx[p];
          acc += 0.5 * (tab.v[i] + tab.v[j]) * (tab.t[j] - tab.t[i]);
        }
        out[idx[p]] = acc;
      }
    }
    return acc;
  };

  side(true);
  side(false);

  for (std::size_t i = 0; i < n; ++i) {
    if (tab.t[i] == 0.0) {
      // continue each side's trapezoid down to 0 from its nearest sample
      const auto hp = detail::positive_half(spec);
      const auto hn = detail::negative_half(spec);
      const cplx from_pos = detail::half_line_integral(hp, 0, 0.0).value;
      const cplx from_neg = detail::half_line_integral(hn, 0, 0.0).value;
      out[i] = 0.5 * (from_pos + from_neg);
    }
  }
  return KernelSpec::tabulated(out_level, TabulatedData{tab.t, std::move(out)});
}

}  // namespace

const char* level_name(KernelLevel level) {
  switch (level) {
    case KernelLevel::K: return "K";
    case KernelLevel::K1: return "K1";
    case KernelLevel::K0: return "K0";
  }
  return "?";
}

const char* condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::KernelDifferenceSign: return "kernel_difference_sign";
    case ConditionId::KernelDifferenceIntegral: return "kernel_difference_integral";
    case ConditionId::EvenPartSign: return "even_part_sign";
    case ConditionId::K0MomentBalance: return "k0_moment_balance";
    case ConditionId::SymbolHalfPlane: return "symbol_half_plane";
    case ConditionId::SymbolNonVanishing: return "symbol_non_vanishing";
  }
  return "?";
}

KernelSpec KernelSpec::closed_form(KernelLevel level, std::vector<ExpPolyTerm> pos,
                                   std::vector<ExpPolyTerm> neg) {
  check_terms(pos);
  check_terms(neg);
  KernelSpec spec;
  spec.level_ = level;
  spec.pos_ = std::move(pos);
  spec.neg_ = std::move(neg);
  return spec;
}

KernelSpec KernelSpec::tabulated(KernelLevel level, TabulatedData data) {
  if (data.t.size() != data.v.size())
    throw SchemaError("tabulated t and v lengths differ");
  if (data.t.size() < 8) throw SchemaError("tabulated spec needs at least 8 samples");
  for (std::size_t i = 1; i < data.t.size(); ++i)
    if (!(data.t[i] > data.t[i - 1]))
      throw SchemaError("tabulated t-grid must be strictly increasing");
  if (!(data.t.front() < 0.0 && data.t.back() > 0.0))
    throw SchemaError("tabulated t-grid must span both signs of t");
  for (const auto& x : data.v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw SchemaError("tabulated values must be finite");

  KernelSpec spec;
  spec.level_ = level;
  spec.table_ = std::move(data);
  const auto hp = detail::positive_half(spec);
  const auto hn = detail::negative_half(spec);
  if (hp.u.size() < 4 || hn.u.size() < 4)
    throw SchemaError("tabulated spec needs at least 4 samples per half-line");
  spec.pos_tail_ = hp.tail;
  spec.neg_tail_ = hn.tail;
  return spec;
}

const TabulatedData& KernelSpec::table() const {
  if (!table_) throw std::logic_error("closed-form spec has no table");
  return *table_;
}

cplx KernelSpec::operator()(double t) const {
  if (!table_) {
    if (t > 0.0) return eval_terms(pos_, t);
    if (t < 0.0) return eval_terms(neg_, -t);
    return 0.5 * (eval_terms(pos_, 0.0) + eval_terms(neg_, 0.0));
  }
  // The sorted t-grid splits into a negative prefix and a nonnegative
  // suffix; interpolate linearly within a side, extend linearly toward 0,
  // and use the fitted tail outward.
  const auto& tab = *table_;
  const std::size_t n = tab.t.size();
  const std::size_t split = std::size_t(
      std::lower_bound(tab.t.begin(), tab.t.end(), 0.0) - tab.t.begin());

  auto interp = [&](std::size_t i, std::size_t j, double x) {
    const double t0 = tab.t[i], t1 = tab.t[j];
    return tab.v[i] + (tab.v[j] - tab.v[i]) * ((x - t0) / (t1 - t0));
  };
  auto pos_value = [&](double x) -> cplx {
    if (x > tab.t[n - 1]) {
      if (!pos_tail_) return 0.0;
      return pos_tail_->c * std::exp(-pos_tail_->a * (x - pos_tail_->edge));
    }
    if (x < tab.t[split]) return interp(split, split + 1, x);
    const std::size_t j = std::size_t(
        std::upper_bound(tab.t.begin() + long(split), tab.t.end(), x) - tab.t.begin());
    return interp(std::min(j, n - 1) - 1, std::min(j, n - 1), x);
  };
  auto neg_value = [&](double x) -> cplx {
    if (x < tab.t[0]) {
      if (!neg_tail_) return 0.0;
      return neg_tail_->c * std::exp(-neg_tail_->a * (-x - neg_tail_->edge));
    }
    if (x > tab.t[split - 1]) return interp(split - 2, split - 1, x);
    const std::size_t j = std::size_t(
        std::upper_bound(tab.t.begin(), tab.t.begin() + long(split), x) - tab.t.begin());
    return interp(std::max<std::size_t>(j, 1) - 1, std::max<std::size_t>(j, 1), x);
  };
  if (t > 0.0) return pos_value(t);
  if (t < 0.0) return neg_value(t);
  return 0.5 * (limit_at_zero(true) + limit_at_zero(false));
}

cplx KernelSpec::limit_at_zero(bool from_above) const {
  if (!table_) return eval_terms(from_above ? pos_ : neg_, 0.0);
  const auto& tab = *table_;
  const std::size_t split = std::size_t(
      std::lower_bound(tab.t.begin(), tab.t.end(), 0.0) - tab.t.begin());
  auto extend = [&](std::size_t i, std::size_t j) {
    const double t0 = tab.t[i], t1 = tab.t[j];
    return tab.v[i] + (tab.v[j] - tab.v[i]) * ((0.0 - t0) / (t1 - t0));
  };
  if (from_above) {
    if (tab.t[split] == 0.0) return tab.v[split];
    return extend(split, split + 1);
  }
  return extend(split - 2, split - 1);
}

bool KernelSpec::is_real() const {
  if (!table_) {
    auto real_terms = [](const std::vector<ExpPolyTerm>& terms) {
      return std::all_of(terms.begin(), terms.end(),
                         [](const ExpPolyTerm& t) { return t.c.imag() == 0.0; });
    };
    return real_terms(pos_) && real_terms(neg_);
  }
  return std::all_of(table_->v.begin(), table_->v.end(),
                     [](const cplx& v) { return v.imag() == 0.0; });
}

KernelSpec KernelSpec::scaled(cplx factor) const {
  KernelSpec spec = *this;
  if (!table_) {
    for (auto& term : spec.pos_) term.c *= factor;
    for (auto& term : spec.neg_) term.c *= factor;
  } else {
    for (auto& v : spec.table_->v) v *= factor;
    if (spec.pos_tail_) spec.pos_tail_->c *= factor;
    if (spec.neg_tail_) spec.neg_tail_->c *= factor;
  }
  return spec;
}

KernelSpec KernelSpec::with_level(KernelLevel level) const {
  KernelSpec spec = *this;
  spec.level_ = level;
  return spec;
}

KernelSpec build_K_from_K1(const KernelSpec& spec) {
  if (spec.level() != KernelLevel::K1)
    throw std::invalid_argument("build_K_from_K1 expects a K1-level spec");
  if (spec.is_closed_form()) {
    return KernelSpec::closed_form(KernelLevel::K, tail_integral_terms(spec.pos_terms()),
                                   tail_integral_terms(spec.neg_terms()));
  }
  return tabulated_tail_integrated(spec, KernelLevel::K);
}

KernelSpec build_K1_from_K0(const KernelSpec& spec) {
  if (spec.level() != KernelLevel::K0)
    throw std::invalid_argument("build_K1_from_K0 expects a K0-level spec");
  if (spec.is_closed_form()) {
    return KernelSpec::closed_form(KernelLevel::K1, tail_integral_terms(spec.pos_terms()),
                                   tail_integral_terms(spec.neg_terms()));
  }
  return tabulated_tail_integrated(spec, KernelLevel::K1);
}

KernelSpec tilde_of(const KernelSpec& spec) {
  if (spec.level() != KernelLevel::K1)
    throw std::invalid_argument("tilde_of expects a K1-level spec");
  if (spec.is_closed_form()) {
    std::vector<ExpPolyTerm> neg = spec.neg_terms();
    for (auto& term : neg) term.c = -term.c;
    return KernelSpec::closed_form(KernelLevel::K1, spec.pos_terms(), std::move(neg));
  }
  TabulatedData data = spec.table();
  for (std::size_t i = 0; i < data.t.size(); ++i)
    if (data.t[i] < 0.0) data.v[i] = -data.v[i];
  return KernelSpec::tabulated(KernelLevel::K1, std::move(data));
}

MomentValue moment(const KernelSpec& spec, int m) {
  if (m < 0 || m > 2) throw std::invalid_argument("moment order must be 0, 1 or 2");
  if (spec.is_closed_form()) {
    const cplx pos = terms_moment(spec.pos_terms(), m);
    const cplx neg = terms_moment(spec.neg_terms(), m);
    return {pos + (m % 2 == 0 ? neg : -neg), 0.0};
  }
  const auto hp = detail::positive_half(spec);
  const auto hn = detail::negative_half(spec);
  const auto ip = detail::half_line_integral(hp, m, 0.0);
  const auto in = detail::half_line_integral(hn, m, 0.0);
  const cplx neg = in.value;
  return {ip.value + (m % 2 == 0 ? neg : -neg), ip.error + in.error};
}

namespace {

double abs_moment(const KernelSpec& spec, int m) {
  if (spec.is_closed_form())
    return terms_abs_moment(spec.pos_terms(), m) + terms_abs_moment(spec.neg_terms(), m);
  return detail::half_line_abs_integral(detail::positive_half(spec), m) +
         detail::half_line_abs_integral(detail::negative_half(spec), m);
}

bool abs_moments_finite(const KernelSpec& spec) {
  if (spec.is_closed_form()) return true;
  return spec.pos_tail().has_value() && spec.neg_tail().has_value();
}

MomentSet moment_set(const KernelSpec& spec, MomentSubject subject) {
  MomentSet ms;
  ms.subject = subject;
  const bool finite = abs_moments_finite(spec);
  ms.nu0_finite = ms.nu1_finite = ms.nu2_finite = finite;
  if (!finite) return ms;
  const double scale = std::max(1.0, abs_moment(spec, 0));
  double* slots[3] = {&ms.nu0, &ms.nu1, &ms.nu2};
  for (int m = 0; m < 3; ++m) {
    const MomentValue v = moment(spec, m);
    if (std::abs(v.value.imag()) > 1e-10 * scale)
      throw std::invalid_argument("classification moments require a real kernel");
    *slots[m] = v.value.real();
  }
  return ms;
}

}  // namespace

MomentSet tilde_k1_moments(const KernelSpec& k1) {
  if (k1.level() != KernelLevel::K1)
    throw std::invalid_argument("tilde_k1_moments expects a K1-level spec");
  return moment_set(tilde_of(k1), MomentSubject::TildeK1);
}

MomentSet k0_moments(const KernelSpec& k0) {
  if (k0.level() != KernelLevel::K0)
    throw std::invalid_argument("k0_moments expects a K0-level spec");
  return moment_set(k0, MomentSubject::K0);
}

namespace {

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double ratio = std::log(hi / lo) / double(n - 1);
  for (int j = 0; j < n; ++j) grid[std::size_t(j)] = lo * std::exp(ratio * j);
  return grid;
}

// pointwise check of g(t) >= 0 on the geometric grid, slack relative to the
// overall magnitude of the two branch values
ConditionVerdict pointwise_sign(ConditionId id, const KernelSpec& spec, double sign,
                                const ConditionTolerances& tol) {
  const auto grid = geometric_grid(1e-6, tol.check_T, tol.check_points);
  double margin = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  double witness = grid.front();
  for (const double t : grid) {
    const cplx a = spec(t), b = spec(-t);
    scale = std::max({scale, std::abs(a), std::abs(b)});
    const double value = (a + sign * b).real();
    if (value < margin) {
      margin = value;
      witness = t;
    }
  }
  ConditionVerdict v;
  v.condition_id = id;
  v.margin = margin;
  v.witness = witness;
  v.tolerance = tol.sign_slack * std::max(1.0, scale);
  v.holds = margin >= -v.tolerance;
  return v;
}

}  // namespace

std::vector<ConditionVerdict> verify_conditions(const KernelSpec& spec,
                                                const ConditionTolerances& tol) {
  std::vector<ConditionVerdict> out;
  const KernelSpec k1 =
      spec.level() == KernelLevel::K0 ? build_K1_from_K0(spec) : spec;
  if (spec.level() == KernelLevel::K)
    throw std::invalid_argument("verify_conditions expects a K1- or K0-level spec");

  // K1(t) - K1(-t) >= 0 on t >= 0
  out.push_back(pointwise_sign(ConditionId::KernelDifferenceSign, k1, -1.0, tol));

  // integral of the difference over (0, inf) strictly positive; the integral
  // equals nu0 of the sign-flipped kernel
  {
    const KernelSpec tilde = tilde_of(k1);
    const double value = moment(tilde, 0).value.real();
    const double scale = std::max(1.0, abs_moment(tilde, 0));
    ConditionVerdict v;
    v.condition_id = ConditionId::KernelDifferenceIntegral;
    v.integral_value = value;
    v.tolerance = tol.strict_floor * scale;
    v.margin = value - v.tolerance;
    v.holds = v.margin > 0.0;
    out.push_back(v);
  }

  if (spec.level() == KernelLevel::K0) {
    out.push_back(pointwise_sign(ConditionId::EvenPartSign, spec, +1.0, tol));

    const MomentSet ms = k0_moments(spec);
    const double scale = std::max(1.0, abs_moment(spec, 0));
    const double floor = tol.strict_floor * scale;
    const double band = tol.zero_band * scale;
    ConditionVerdict v;
    v.condition_id = ConditionId::K0MomentBalance;
    v.integral_value = ms.nu0;
    v.tolerance = band;
    v.margin = std::min({ms.nu0 - floor, ms.nu2 - floor, band - std::abs(ms.nu1)});
    v.holds = ms.nu0_finite && ms.nu1_finite && ms.nu2_finite && ms.nu0 > floor &&
              ms.nu2 > floor && std::abs(ms.nu1) <= band;
    out.push_back(v);
  }
  return out;
}

}  // namespace wh
