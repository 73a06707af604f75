#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wh/kernel.hpp"
#include "wh/symbol.hpp"

namespace wh {

struct ClassifyTolerances {
  double zero_band = 1e-9;  // |nu1| <= band * max(1, nu0) selects the nu1 = 0 branch
};

struct K0Data {
  std::vector<ConditionVerdict> verdicts;
  MomentSet moments;
};

// The case decision: the K0 route (even-part sign + moment balance) takes
// precedence when K0 data is supplied; otherwise the sign conditions gate
// the nu1 trichotomy.  Kernels outside all four cases come back Unclassified.
CaseLabel classify(const std::vector<ConditionVerdict>& k1_verdicts,
                   const MomentSet& tilde_moments,
                   const std::optional<K0Data>& k0 = std::nullopt,
                   const ClassifyTolerances& tol = {});

struct FCondition {
  std::string requirement;     // membership demanded of the right-hand side
  std::string upgraded_space;  // where the solution then lives
};

struct SolvabilityReport {
  CaseLabel case_label = CaseLabel::Unclassified;
  std::string rho_plus;  // "1/(λ+i)", "λ/(λ+i)²" or "1/(λ+i)²"
  std::string rho_minus; // "1" or "1/(λ−i)"
  int kappa = 0;         // index of the regular factor in the chosen factorization
  int dim_ker = 0;
  int dim_coker = 0;
  std::string solution_space;
  std::optional<FCondition> f_condition;
  std::string homogeneous_note;
  // For some cases two inequivalent placements of the homogeneous solution
  // are defensible; both are carried and the ambiguity flagged.
  std::optional<std::string> homogeneous_note_alternate;
  bool homogeneous_placement_ambiguous = false;
};

// Populates the report for a classified case.  The winding passed in must be
// that of the case's regular factor: c1 for the first two cases, the
// identity-true bracketed factor ((λ+i)/(λ−i))·c1 resp. ((λ+i)/(λ−i))·e for
// the other two.
SolvabilityReport solvability_report(CaseLabel c, const WindingResult& winding,
                                     const ConditionVerdict& nonvanishing);

// Fredholm dimensions from the factor index (the square-integrable branch,
// delta = 0): dim ker = max(-kappa, 0), dim coker = max(kappa, 0).
int expected_kappa(CaseLabel c);

}  // namespace wh
