#pragma once

#include <optional>
#include <vector>

#include "wh/errors.hpp"
#include "wh/types.hpp"

namespace wh {

enum class KernelLevel { K, K1, K0 };

const char* level_name(KernelLevel level);

// One closed-form term c * t^k * exp(-a t); on the negative half-line the
// same expression is taken in |t|.
struct ExpPolyTerm {
  cplx c{};
  int k = 0;
  double a = 1.0;
};

struct TabulatedData {
  std::vector<double> t;
  std::vector<cplx> v;
};

// Exponential tail model v(u) = c * exp(-a (u - edge)) for u >= edge, fitted
// from the last decade of samples of a tabulated kernel.
struct TailFit {
  cplx c{};
  double a = 1.0;
  double edge = 0.0;
};

// A kernel at one of the three representation levels.  Closed-form
// (exp-polynomial terms per half-line) and tabulated representations are
// mutually exclusive.
class KernelSpec {
 public:
  static KernelSpec closed_form(KernelLevel level, std::vector<ExpPolyTerm> pos,
                                std::vector<ExpPolyTerm> neg);
  static KernelSpec tabulated(KernelLevel level, TabulatedData data);

  KernelLevel level() const { return level_; }
  bool is_closed_form() const { return !table_.has_value(); }
  const std::vector<ExpPolyTerm>& pos_terms() const { return pos_; }
  const std::vector<ExpPolyTerm>& neg_terms() const { return neg_; }
  const TabulatedData& table() const;

  // Pointwise value; at t = 0 the mean of the two one-sided limits.  A
  // tabulated sample at exactly t = 0 counts as the limit from above.
  cplx operator()(double t) const;

  // One-sided limits at t = 0 (kernels may jump there).
  cplx limit_at_zero(bool from_above) const;

  bool is_real() const;
  KernelSpec scaled(cplx factor) const;
  KernelSpec with_level(KernelLevel level) const;

  const std::optional<TailFit>& pos_tail() const { return pos_tail_; }
  const std::optional<TailFit>& neg_tail() const { return neg_tail_; }

 private:
  KernelSpec() = default;
  KernelLevel level_ = KernelLevel::K1;
  std::vector<ExpPolyTerm> pos_, neg_;
  std::optional<TabulatedData> table_;
  std::optional<TailFit> pos_tail_, neg_tail_;  // tabulated specs only
};

enum class MomentSubject { TildeK1, K0 };

struct MomentSet {
  double nu0 = 0, nu1 = 0, nu2 = 0;
  bool nu0_finite = false, nu1_finite = false, nu2_finite = false;
  MomentSubject subject = MomentSubject::TildeK1;
};

enum class ConditionId {
  KernelDifferenceSign,      // K1(t) - K1(-t) >= 0 on t >= 0
  KernelDifferenceIntegral,  // integral of the difference over (0, inf) > 0
  EvenPartSign,              // K0(t) + K0(-t) >= 0 on t >= 0
  K0MomentBalance,           // nu1(K0) = 0, nu0(K0) > 0, nu2(K0) > 0
  SymbolHalfPlane,           // Re of the symbol positive off lambda = 0
  SymbolNonVanishing,        // |symbol| bounded away from 0 on the closed line
};

const char* condition_name(ConditionId id);

struct ConditionVerdict {
  ConditionId condition_id{};
  bool holds = false;
  double margin = 0;                     // worst-case slack
  double tolerance = 0;                  // the absolute tolerance applied
  std::optional<double> witness;         // abscissa where the slack is attained
  std::optional<double> integral_value;  // integral conditions only
};

struct MomentValue {
  cplx value{};
  double error = 0;  // quadrature estimate; 0 for closed forms
};

struct ConditionTolerances {
  double sign_slack = 1e-10;    // pointwise conditions, relative to kernel scale
  double strict_floor = 1e-10;  // strict inequalities, relative to kernel scale
  double zero_band = 1e-9;      // |nu1| band in the K0 moment balance
  double check_T = 40.0;        // pointwise checks on a geometric grid [1e-6, check_T]
  int check_points = 512;
};

// Tail integration: K(t) = int_t^inf K1 for t > 0, int_{-inf}^t K1 for t < 0.
KernelSpec build_K_from_K1(const KernelSpec& spec);
// Same tail integration one level down: K1 from K0.
KernelSpec build_K1_from_K0(const KernelSpec& spec);
// Sign-flips the negative half-line part.
KernelSpec tilde_of(const KernelSpec& spec);

// nu_m = integral of t^m spec(t) over the line, m in {0, 1, 2}.  Exact for
// closed forms, quadrature with attached error estimate for tabulated data.
MomentValue moment(const KernelSpec& spec, int m);

// Moment sets driving the classification.  Both require a real kernel.
MomentSet tilde_k1_moments(const KernelSpec& k1);
MomentSet k0_moments(const KernelSpec& k0);

// Admissibility checks for the spec's level: a K1 kernel gets the
// difference-sign and difference-integral conditions; a K0 kernel
// additionally gets the even-part sign and moment-balance conditions
// (the first two evaluated on the derived K1).
std::vector<ConditionVerdict> verify_conditions(const KernelSpec& spec,
                                                const ConditionTolerances& tol = {});

}  // namespace wh
