#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wh/classify.hpp"
#include "wh/kernel.hpp"
#include "wh/solver.hpp"
#include "wh/spaces.hpp"
#include "wh/symbol.hpp"

namespace wh {

enum class Command { Analyze, Classify, Solve, Verify };

const char* command_name(Command c);

enum class ExitCode : int {
  Ok = 0,
  Failure = 1,
  Unclassified = 2,
  VanishingSymbol = 3,
  IndexMismatch = 4,
  BadInput = 5,
};

struct AnalysisConfig {
  int grid_n = 2048;             // power of two; includes the 0 and inf slots
  double map_L = 1.0;            // compactification lambda = L tan(theta)
  double tol_nonvanishing = 1e-9;
  double tol_zero = 1e-9;        // |nu1| zero band
  double tol_sign = 1e-10;       // pointwise sign slack
  double tol_strict = 1e-10;     // strict inequality floor
  double cond_check_T = 40.0;
  int cond_check_points = 512;
  double ft_tol = 1e-3;          // tabulated transform error budget
  double solver_T = 40.0;
  int solver_n = 1024;
  Regularization regularization;

  void validate() const;  // throws SchemaError
  nlohmann::json to_json() const;
  static AnalysisConfig from_json(const nlohmann::json& j);

  ConditionTolerances condition_tolerances() const;
  ClassifyTolerances classify_tolerances() const;
};

// Kernel-spec document: {"level": "K1", "pos_terms": [{"c","k","a"}...],
// "neg_terms": [...]} or {"level": ..., "tabulated": {"t": [...], "v": [...]}};
// complex numbers are plain numbers or [re, im] pairs.
KernelSpec parse_kernel_spec(const nlohmann::json& doc);
nlohmann::json kernel_spec_to_json(const KernelSpec& spec);

struct ReportDocument {
  nlohmann::json body;
  CaseLabel case_label = CaseLabel::Unclassified;
  std::optional<SolvabilityReport> solvability;
  // sidecar CSVs as (file name, content)
  std::vector<std::pair<std::string, std::string>> sidecars;

  std::string dump() const { return body.dump(2) + "\n"; }
};

// Runs the full pipeline for one kernel spec.  analyze stops after symbols
// and windings; classify adds the solvability report; solve adds the
// desk-scale regularized solve; verify adds dual-route oracle comparisons.
ReportDocument run(Command cmd, const AnalysisConfig& config, const KernelSpec& spec,
                   const std::optional<GridFunction>& rhs = std::nullopt,
                   bool manufactured = false, bool want_plot_csv = false);

// Exit code the CLI reports for a finished run (Unclassified is a value, not
// an error, but scripted runs need to see it in the status).
ExitCode exit_code_for(const ReportDocument& report);

}  // namespace wh
