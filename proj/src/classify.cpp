#include "wh/classify.hpp"

#include <algorithm>
#include <cmath>

namespace wh {
namespace {

const ConditionVerdict* find_verdict(const std::vector<ConditionVerdict>& verdicts,
                                     ConditionId id) {
  const auto it = std::find_if(verdicts.begin(), verdicts.end(),
                               [id](const ConditionVerdict& v) {
                                 return v.condition_id == id;
                               });
  return it == verdicts.end() ? nullptr : &*it;
}

bool verdict_holds(const std::vector<ConditionVerdict>& verdicts, ConditionId id) {
  const ConditionVerdict* v = find_verdict(verdicts, id);
  return v != nullptr && v->holds;
}

}  // namespace

CaseLabel classify(const std::vector<ConditionVerdict>& k1_verdicts,
                   const MomentSet& tilde_moments, const std::optional<K0Data>& k0,
                   const ClassifyTolerances& tol) {
  if (tilde_moments.subject != MomentSubject::TildeK1)
    throw std::invalid_argument("classify expects TildeK1 moments");

  // K0 route first: the sign conditions on K1 can fail (symmetric kernels)
  // while the K0 conditions still settle the case.
  if (k0.has_value()) {
    const MomentSet& m = k0->moments;
    if (verdict_holds(k0->verdicts, ConditionId::EvenPartSign) &&
        verdict_holds(k0->verdicts, ConditionId::K0MomentBalance) && m.nu0_finite &&
        m.nu1_finite && m.nu2_finite)
      return CaseLabel::AlphaBeta;
  }

  if (!verdict_holds(k1_verdicts, ConditionId::KernelDifferenceSign) ||
      !verdict_holds(k1_verdicts, ConditionId::KernelDifferenceIntegral))
    return CaseLabel::Unclassified;
  if (!tilde_moments.nu0_finite || !tilde_moments.nu1_finite)
    return CaseLabel::Unclassified;

  const double band = tol.zero_band * std::max(1.0, tilde_moments.nu0);
  if (tilde_moments.nu1 > band) return CaseLabel::CaseI;
  if (tilde_moments.nu1 < -band) return CaseLabel::CaseII;
  if (tilde_moments.nu2_finite && tilde_moments.nu2 > band) return CaseLabel::CaseIII;
  return CaseLabel::Unclassified;
}

int expected_kappa(CaseLabel c) {
  switch (c) {
    case CaseLabel::CaseI: return 0;
    case CaseLabel::CaseII: return -1;
    case CaseLabel::CaseIII: return -1;   // bracketed factor
    case CaseLabel::AlphaBeta: return -1; // bracketed factor
    case CaseLabel::Unclassified: break;
  }
  throw std::invalid_argument("no factor index for an unclassified kernel");
}

SolvabilityReport solvability_report(CaseLabel c, const WindingResult& winding,
                                     const ConditionVerdict& nonvanishing) {
  if (c == CaseLabel::Unclassified)
    throw std::invalid_argument("no solvability report for an unclassified kernel");
  if (!nonvanishing.holds)
    throw VanishingSymbol("regular factor is not bounded away from zero");
  const int kappa = expected_kappa(c);
  if (winding.index != kappa)
    throw IndexMismatch("winding index " + std::to_string(winding.index) +
                        " contradicts the case (expected " + std::to_string(kappa) +
                        ")");

  SolvabilityReport r;
  r.case_label = c;
  r.kappa = kappa;
  r.dim_ker = std::max(-kappa, 0);
  r.dim_coker = std::max(kappa, 0);

  switch (c) {
    case CaseLabel::CaseI:
      r.rho_plus = "1/(λ+i)";
      r.rho_minus = "1";
      r.solution_space = "Ẽ₊(1/(λ+i))";
      r.homogeneous_note = "only the trivial solution in Ẽ₊(1/(λ+i))";
      break;
    case CaseLabel::CaseII:
      r.rho_plus = "1/(λ+i)";
      r.rho_minus = "1";
      r.solution_space = "Ẽ₊(1/(λ+i))";
      r.f_condition = FCondition{"f ∈ Ē₊(1/(λ−i))", "Ẽ₊(λ/(λ+i))"};
      r.homogeneous_note =
          "one linearly independent solution in Ẽ(λ/(λ+i)²)\\Ẽ₊(λ/(λ+i))";
      r.homogeneous_note_alternate =
          "one linearly independent solution in Ẽ₊(1/(λ+i))";
      r.homogeneous_placement_ambiguous = true;
      break;
    case CaseLabel::CaseIII:
      r.rho_plus = "λ/(λ+i)²";
      r.rho_minus = "1";
      r.solution_space = "Ẽ₊(λ/(λ+i)²)";
      r.homogeneous_note =
          "one linearly independent solution in Ẽ₊(λ/(λ+i)²)";
      r.homogeneous_note_alternate =
          "one linearly independent solution in Ẽ(λ/(λ+i)²)\\Ẽ₊(λ/(λ+i))";
      r.homogeneous_placement_ambiguous = true;
      break;
    case CaseLabel::AlphaBeta:
      r.rho_plus = "1/(λ+i)²";
      r.rho_minus = "1";
      r.solution_space = "Ẽ(1/(λ+i)²)";
      r.f_condition = FCondition{"f ∈ Ē₊(1/(λ−i))", "Ẽ₊(1/(λ+i))"};
      r.homogeneous_note =
          "one linearly independent solution in Ẽ(1/(λ+i)²)\\Ẽ₊(1/(λ+i))";
      break;
    case CaseLabel::Unclassified:
      break;
  }
  return r;
}

}  // namespace wh
