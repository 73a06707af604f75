#include "wh/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wh/version.hpp"

namespace wh {
namespace {

using nlohmann::json;

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

cplx cplx_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw SchemaError(where + ": expected a number or [re, im]");
}

json verdict_json(const ConditionVerdict& v) {
  json j;
  j["condition"] = condition_name(v.condition_id);
  j["holds"] = v.holds;
  j["margin"] = v.margin;
  j["tolerance"] = v.tolerance;
  if (v.witness) j["witness"] = *v.witness;
  if (v.integral_value) j["integral"] = *v.integral_value;
  return j;
}

json moments_json(const MomentSet& m) {
  json j;
  j["subject"] = m.subject == MomentSubject::TildeK1 ? "tilde_K1" : "K0";
  if (m.nu0_finite) j["nu0"] = m.nu0;
  if (m.nu1_finite) j["nu1"] = m.nu1;
  if (m.nu2_finite) j["nu2"] = m.nu2;
  j["abs_finite"] = json::array({m.nu0_finite, m.nu1_finite, m.nu2_finite});
  return j;
}

json endpoints_json(const SymbolSamples& s) {
  json j;
  j["label"] = symbol_label_name(s.label);
  j["value_at_zero"] = cplx_json(s.value_at_zero);
  j["value_at_infinity"] = cplx_json(s.value_at_infinity);
  j["grid_n"] = s.grid.subdivisions();
  j["grid_L"] = s.grid.map_parameter();
  return j;
}

json winding_json(const std::string& symbol, const WindingResult& w) {
  json j;
  j["symbol"] = symbol;
  j["index"] = w.index;
  j["raw_phase_turns"] = w.raw_phase_turns;
  j["max_phase_step"] = w.max_phase_step;
  return j;
}

json solvability_json(const SolvabilityReport& r) {
  json j;
  j["case"] = case_name(r.case_label);
  j["rho_plus"] = r.rho_plus;
  j["rho_minus"] = r.rho_minus;
  j["kappa"] = r.kappa;
  j["dim_ker"] = r.dim_ker;
  j["dim_coker"] = r.dim_coker;
  j["solution_space"] = r.solution_space;
  if (r.f_condition) {
    j["f_condition"] = {{"requirement", r.f_condition->requirement},
                        {"upgraded_space", r.f_condition->upgraded_space}};
  }
  j["homogeneous"] = r.homogeneous_note;
  if (r.homogeneous_note_alternate)
    j["homogeneous_alternate"] = *r.homogeneous_note_alternate;
  j["homogeneous_placement_ambiguous"] = r.homogeneous_placement_ambiguous;
  return j;
}

json regularization_json(const Regularization& r) {
  json j;
  switch (r.kind) {
    case Regularization::Kind::TsvdThreshold:
      j["kind"] = "tsvd_threshold";
      j["threshold"] = r.threshold;
      break;
    case Regularization::Kind::TsvdRank:
      j["kind"] = "tsvd_rank";
      j["rank"] = r.rank;
      break;
    case Regularization::Kind::Tikhonov:
      j["kind"] = "tikhonov";
      j["parameter"] = r.parameter;
      break;
  }
  return j;
}

Regularization regularization_from_json(const json& j) {
  Regularization r;
  const std::string kind = j.value("kind", "tsvd_threshold");
  if (kind == "tsvd_threshold") {
    r.kind = Regularization::Kind::TsvdThreshold;
    r.threshold = j.value("threshold", 1e-8);
  } else if (kind == "tsvd_rank") {
    r.kind = Regularization::Kind::TsvdRank;
    r.rank = j.value("rank", 0);
  } else if (kind == "tikhonov") {
    r.kind = Regularization::Kind::Tikhonov;
    r.parameter = j.value("parameter", 0.0);
  } else {
    throw SchemaError("regularization.kind: unknown value '" + kind + "'");
  }
  return r;
}

std::vector<ExpPolyTerm> terms_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw SchemaError(where + ": expected an array");
  std::vector<ExpPolyTerm> terms;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& t = arr[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!t.is_object()) throw SchemaError(at + ": expected an object {c, k, a}");
    for (const auto& key : {"c", "k", "a"})
      if (!t.contains(key)) throw SchemaError(at + ": missing field '" + key + "'");
    ExpPolyTerm term;
    term.c = cplx_from_json(t["c"], at + ".c");
    if (!t["k"].is_number_integer() || t["k"].get<int>() < 0)
      throw SchemaError(at + ".k: expected a nonnegative integer");
    term.k = t["k"].get<int>();
    if (!t["a"].is_number()) throw SchemaError(at + ".a: expected a number");
    term.a = t["a"].get<double>();
    if (!(term.a > 0.0)) throw SchemaError(at + ".a: decay rate must be positive");
    terms.push_back(term);
  }
  return terms;
}

json terms_to_json(const std::vector<ExpPolyTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms) {
    json e;
    e["c"] = t.c.imag() == 0.0 ? json(t.c.real()) : cplx_json(t.c);
    e["k"] = t.k;
    e["a"] = t.a;
    arr.push_back(e);
  }
  return arr;
}

// decimated interior subset used by the verify command's cross-checks
std::vector<std::size_t> decimated_indices(std::size_t n, std::size_t target) {
  const std::size_t stride = std::max<std::size_t>(1, n / target);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; k += stride) idx.push_back(k);
  return idx;
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::Analyze: return "analyze";
    case Command::Classify: return "classify";
    case Command::Solve: return "solve";
    case Command::Verify: return "verify";
  }
  return "?";
}

void AnalysisConfig::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw SchemaError(std::string("config.") + name + " must be positive");
  };
  if (grid_n < 16 || (grid_n & (grid_n - 1)) != 0)
    throw SchemaError("config.grid_n must be a power of two >= 16");
  positive(map_L, "map_L");
  positive(tol_nonvanishing, "tol_nonvanishing");
  positive(tol_zero, "tol_zero");
  positive(tol_sign, "tol_sign");
  positive(tol_strict, "tol_strict");
  positive(cond_check_T, "cond_check_T");
  if (cond_check_points < 16) throw SchemaError("config.cond_check_points too small");
  positive(ft_tol, "ft_tol");
  positive(solver_T, "solver_T");
  if (solver_n < 16) throw SchemaError("config.solver_n too small");
}

json AnalysisConfig::to_json() const {
  json j;
  j["grid_n"] = grid_n;
  j["map_L"] = map_L;
  j["tol_nonvanishing"] = tol_nonvanishing;
  j["tol_zero"] = tol_zero;
  j["tol_sign"] = tol_sign;
  j["tol_strict"] = tol_strict;
  j["cond_check_T"] = cond_check_T;
  j["cond_check_points"] = cond_check_points;
  j["ft_tol"] = ft_tol;
  j["solver_T"] = solver_T;
  j["solver_n"] = solver_n;
  j["regularization"] = regularization_json(regularization);
  return j;
}

AnalysisConfig AnalysisConfig::from_json(const json& j) {
  AnalysisConfig c;
  if (!j.is_object()) throw SchemaError("config: expected an object");
  c.grid_n = j.value("grid_n", c.grid_n);
  c.map_L = j.value("map_L", c.map_L);
  c.tol_nonvanishing = j.value("tol_nonvanishing", c.tol_nonvanishing);
  c.tol_zero = j.value("tol_zero", c.tol_zero);
  c.tol_sign = j.value("tol_sign", c.tol_sign);
  c.tol_strict = j.value("tol_strict", c.tol_strict);
  c.cond_check_T = j.value("cond_check_T", c.cond_check_T);
  c.cond_check_points = j.value("cond_check_points", c.cond_check_points);
  c.ft_tol = j.value("ft_tol", c.ft_tol);
  c.solver_T = j.value("solver_T", c.solver_T);
  c.solver_n = j.value("solver_n", c.solver_n);
  if (j.contains("regularization"))
    c.regularization = regularization_from_json(j["regularization"]);
  c.validate();
  return c;
}

ConditionTolerances AnalysisConfig::condition_tolerances() const {
  ConditionTolerances t;
  t.sign_slack = tol_sign;
  t.strict_floor = tol_strict;
  t.zero_band = tol_zero;
  t.check_T = cond_check_T;
  t.check_points = cond_check_points;
  return t;
}

ClassifyTolerances AnalysisConfig::classify_tolerances() const {
  return ClassifyTolerances{tol_zero};
}

KernelSpec parse_kernel_spec(const json& doc) {
  if (!doc.is_object()) throw SchemaError("kernel spec: expected an object");
  if (!doc.contains("level")) throw SchemaError("kernel spec: missing field 'level'");
  const std::string level_str = doc["level"].get<std::string>();
  KernelLevel level;
  if (level_str == "K") level = KernelLevel::K;
  else if (level_str == "K1") level = KernelLevel::K1;
  else if (level_str == "K0") level = KernelLevel::K0;
  else throw SchemaError("kernel spec: level must be one of K, K1, K0");

  const bool has_terms = doc.contains("pos_terms") || doc.contains("neg_terms");
  const bool has_table = doc.contains("tabulated");
  if (has_terms && has_table)
    throw SchemaError("kernel spec: closed-form terms and tabulated data are mutually exclusive");
  if (!has_terms && !has_table)
    throw SchemaError("kernel spec: provide pos_terms/neg_terms or tabulated");

  if (has_table) {
    const json& tab = doc["tabulated"];
    if (!tab.is_object() || !tab.contains("t") || !tab.contains("v"))
      throw SchemaError("kernel spec: tabulated needs arrays 't' and 'v'");
    TabulatedData data;
    for (const auto& x : tab["t"]) {
      if (!x.is_number()) throw SchemaError("kernel spec: tabulated.t entries must be numbers");
      data.t.push_back(x.get<double>());
    }
    std::size_t i = 0;
    for (const auto& x : tab["v"])
      data.v.push_back(cplx_from_json(x, "tabulated.v[" + std::to_string(i++) + "]"));
    return KernelSpec::tabulated(level, std::move(data));
  }

  std::vector<ExpPolyTerm> pos, neg;
  if (doc.contains("pos_terms")) pos = terms_from_json(doc["pos_terms"], "pos_terms");
  if (doc.contains("neg_terms")) neg = terms_from_json(doc["neg_terms"], "neg_terms");
  return KernelSpec::closed_form(level, std::move(pos), std::move(neg));
}

json kernel_spec_to_json(const KernelSpec& spec) {
  json j;
  j["level"] = level_name(spec.level());
  if (spec.is_closed_form()) {
    j["pos_terms"] = terms_to_json(spec.pos_terms());
    j["neg_terms"] = terms_to_json(spec.neg_terms());
  } else {
    json tab;
    tab["t"] = spec.table().t;
    json vs = json::array();
    for (const auto& v : spec.table().v)
      vs.push_back(v.imag() == 0.0 ? json(v.real()) : cplx_json(v));
    tab["v"] = vs;
    j["tabulated"] = tab;
  }
  return j;
}

ReportDocument run(Command cmd, const AnalysisConfig& config, const KernelSpec& spec,
                   const std::optional<GridFunction>& rhs, bool manufactured,
                   bool want_plot_csv) {
  config.validate();
  if (spec.level() == KernelLevel::K)
    throw SchemaError("analysis needs a kernel at level K1 or K0");
  if (!spec.is_real())
    throw SchemaError("classification requires a real-valued kernel");

  ReportDocument report;
  json& body = report.body;
  body["schema_version"] = kReportSchemaVersion;
  body["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  body["command"] = command_name(cmd);
  body["config"] = config.to_json();
  body["kernel"] = kernel_spec_to_json(spec);

  json warnings = json::array();
  if (spec.is_closed_form() && spec.pos_terms().empty() && spec.neg_terms().empty())
    warnings.push_back("zero kernel: both term lists are empty");

  // kernel stage
  const bool from_k0 = spec.level() == KernelLevel::K0;
  const KernelSpec k1 = from_k0 ? build_K1_from_K0(spec) : spec;
  if (from_k0) body["derived_k1"] = kernel_spec_to_json(k1);

  const ConditionTolerances ctol = config.condition_tolerances();
  const MomentSet tmoments = tilde_k1_moments(k1);
  body["moments"]["tilde_k1"] = moments_json(tmoments);

  std::optional<K0Data> k0data;
  std::vector<ConditionVerdict> k1_verdicts;
  if (from_k0) {
    const std::vector<ConditionVerdict> all = verify_conditions(spec, ctol);
    // the first two verdicts are the K1 conditions evaluated on the derived K1
    k1_verdicts.assign(all.begin(), all.begin() + 2);
    K0Data data;
    data.verdicts.assign(all.begin() + 2, all.end());
    data.moments = k0_moments(spec);
    body["moments"]["k0"] = moments_json(data.moments);
    json jk0 = json::array();
    for (const auto& v : data.verdicts) jk0.push_back(verdict_json(v));
    body["conditions"]["k0"] = jk0;
    k0data = std::move(data);
  } else {
    k1_verdicts = verify_conditions(k1, ctol);
  }
  json jk1 = json::array();
  for (const auto& v : k1_verdicts) jk1.push_back(verdict_json(v));
  body["conditions"]["k1"] = jk1;

  // classification decision
  const CaseLabel label = classify(k1_verdicts, tmoments, k0data,
                                   config.classify_tolerances());
  report.case_label = label;
  body["classification"]["case"] = case_name(label);

  // symbol stage
  const LambdaGrid grid = LambdaGrid::make(config.grid_n, config.map_L);
  const SymbolSamples b = eval_b(k1, tmoments, grid, config.ft_tol);
  const SymbolSamples a = eval_a(b, tmoments);
  json symbols = json::array();
  symbols.push_back(endpoints_json(b));
  symbols.push_back(endpoints_json(a));
  body["halfplane"] = verdict_json(check_arg_halfplane(b));

  json windings = json::array();
  std::optional<SymbolSamples> factor;      // the case's regular factor
  std::optional<SymbolSamples> kappa_factor;  // whose winding is kappa
  if (label == CaseLabel::CaseI || label == CaseLabel::CaseII ||
      label == CaseLabel::CaseIII) {
    const SymbolSamples c = eval_regular_factor(label, b, tmoments, config.tol_zero);
    // the index lives on c1 = i (1 + i/lambda) b; in the nu1 = 0 case that
    // pole is absorbed into [1 + 1/lambda^2] b instead
    const SymbolSamples c1 = label == CaseLabel::CaseIII
                                 ? scale_samples(c, kImag, SymbolLabel::c1)
                                 : eval_c1(b, tmoments);
    symbols.push_back(endpoints_json(c));
    symbols.push_back(endpoints_json(c1));
    const WindingResult wc1 = winding_index(c1, config.tol_nonvanishing);
    windings.push_back(winding_json("c1", wc1));
    factor = c;
    if (label == CaseLabel::CaseIII) {
      // lambda/(1+lambda^2) = [lambda/(lambda+i)^2] * [(lambda+i)/(lambda-i)]
      const SymbolSamples bp = multiply_blaschke(c1, BlaschkeOrientation::PlusOverMinus);
      const SymbolSamples bm = multiply_blaschke(c1, BlaschkeOrientation::MinusOverPlus);
      const WindingResult wp = winding_index(bp, config.tol_nonvanishing);
      const WindingResult wm = winding_index(bm, config.tol_nonvanishing);
      json jp = winding_json("((λ+i)/(λ−i))·c1", wp);
      jp["factorization_identity"] = true;  // a = λ/(λ+i)² times this factor
      json jm = winding_json("((λ−i)/(λ+i))·c1", wm);
      jm["factorization_identity"] = false;
      windings.push_back(jp);
      windings.push_back(jm);
      kappa_factor = bp;
    } else {
      kappa_factor = c1;
      if (label == CaseLabel::CaseII) {
        // the alternative display 1/(λ−i) · [((λ−i)/(λ+i)) c1] has index 0
        const SymbolSamples bm = multiply_blaschke(c1, BlaschkeOrientation::MinusOverPlus);
        windings.push_back(
            winding_json("((λ−i)/(λ+i))·c1", winding_index(bm, config.tol_nonvanishing)));
      }
    }
  } else if (label == CaseLabel::AlphaBeta) {
    const SymbolSamples d = eval_d(spec, k0data->moments, grid, config.ft_tol);
    const SymbolSamples e =
        eval_regular_factor(label, d, k0data->moments, config.tol_zero);
    symbols.push_back(endpoints_json(d));
    symbols.push_back(endpoints_json(e));
    windings.push_back(winding_json("e", winding_index(e, config.tol_nonvanishing)));
    // 1/(1+lambda^2) = [1/(lambda+i)^2] * [(lambda+i)/(lambda-i)]
    const SymbolSamples bp = multiply_blaschke(e, BlaschkeOrientation::PlusOverMinus);
    const SymbolSamples bm = multiply_blaschke(e, BlaschkeOrientation::MinusOverPlus);
    json jp = winding_json("((λ+i)/(λ−i))·e", winding_index(bp, config.tol_nonvanishing));
    jp["factorization_identity"] = true;
    json jm = winding_json("((λ−i)/(λ+i))·e", winding_index(bm, config.tol_nonvanishing));
    jm["factorization_identity"] = false;
    windings.push_back(jp);
    windings.push_back(jm);
    factor = e;
    kappa_factor = bp;
  }
  body["symbols"] = symbols;
  body["windings"] = windings;

  if (want_plot_csv) {
    std::ostringstream os;
    write_symbol_csv(os, b);
    report.sidecars.emplace_back("symbol_b.csv", os.str());
    if (factor) {
      std::ostringstream fs;
      write_symbol_csv(fs, *factor);
      report.sidecars.emplace_back(
          std::string("symbol_") + symbol_label_name(factor->label) + ".csv", fs.str());
    }
  }

  // solvability report (classify and up)
  if (cmd != Command::Analyze && label != CaseLabel::Unclassified) {
    const ConditionVerdict nonvan =
        check_nonvanishing(*kappa_factor, config.tol_nonvanishing);
    body["nonvanishing"] = verdict_json(nonvan);
    const WindingResult wk = winding_index(*kappa_factor, config.tol_nonvanishing);
    const SolvabilityReport sr = solvability_report(label, wk, nonvan);
    report.solvability = sr;
    body["classification"]["solvability"] = solvability_json(sr);
  }

  // desk-scale solve
  if (cmd == Command::Solve) {
    const KernelSpec K = build_K_from_K1(k1);
    const DiscretizedOperator A = discretize(K, config.solver_T, config.solver_n);
    std::optional<GridFunction> phi_star;
    GridFunction f = [&]() -> GridFunction {
      if (rhs) {
        if (rhs->size() != A.n || rhs->T() != A.T)
          throw SchemaError("rhs grid does not match solver_T/solver_n");
        return *rhs;
      }
      if (!manufactured)
        throw SchemaError("solve needs --rhs or --manufactured");
      phi_star = GridFunction::sample(A.T, A.n,
                                      [](double t) { return std::exp(-t); });
      return manufacture_rhs(A, *phi_star);
    }();

    const SolveResult res = solve_regularized(A, f, config.regularization);
    json jsolve;
    jsolve["T"] = A.T;
    jsolve["n"] = A.n;
    jsolve["regularization"] = regularization_json(res.regularization);
    jsolve["residual_norm"] = res.residual_norm;
    jsolve["sigma_max"] = res.singular_values.front();
    jsolve["sigma_min"] = res.singular_values.back();
    jsolve["estimated_null_dim"] = res.estimated_null_dim;
    jsolve["null_dim_confident"] = res.null_dim_confident;
    if (phi_star) {
      jsolve["manufactured_phi"] = "exp(-t)";
      jsolve["recovery_rel_error"] =
          (res.solution - *phi_star).norm() / phi_star->norm();
    }
    body["solve"] = jsolve;

    std::ostringstream sol;
    sol << "t,re,im\n";
    sol.precision(17);
    for (int j = 0; j < res.solution.size(); ++j)
      sol << res.solution.t(j) << ',' << res.solution[j].real() << ','
          << res.solution[j].imag() << '\n';
    report.sidecars.emplace_back("solution.csv", sol.str());

    std::ostringstream sv;
    sv << "index,sigma\n";
    sv.precision(17);
    for (std::size_t i = 0; i < res.singular_values.size(); ++i)
      sv << i << ',' << res.singular_values[i] << '\n';
    report.sidecars.emplace_back("singular_values.csv", sv.str());
  }

  // dual-route oracle comparisons
  if (cmd == Command::Verify) {
    json jverify;
    if (!spec.is_closed_form()) {
      jverify["skipped"] = "no closed form available";
    } else {
      // densely resample the closed form and push it through the tabulated route
      const double Tv = config.cond_check_T;
      const int N = 16000;
      TabulatedData data;
      data.t.reserve(std::size_t(N));
      data.v.reserve(std::size_t(N));
      for (int i = 0; i < N; ++i) {
        const double t = -Tv + (double(i) + 0.5) * (2.0 * Tv / N);
        data.t.push_back(t);
        data.v.push_back(k1(t));
      }
      const KernelSpec k1_tab = KernelSpec::tabulated(KernelLevel::K1, std::move(data));
      const MomentSet tm_tab = tilde_k1_moments(k1_tab);
      jverify["moment_deviation"] = json::array(
          {std::abs(tm_tab.nu0 - tmoments.nu0), std::abs(tm_tab.nu1 - tmoments.nu1),
           std::abs(tm_tab.nu2 - tmoments.nu2)});

      const auto idx = decimated_indices(grid.interior().size(), 256);
      double sup_b = std::abs(b.value_at_infinity);
      for (const cplx& v : b.values) sup_b = std::max(sup_b, std::abs(v));
      double max_dev = 0.0;
      const KernelSpec tilde_tab = tilde_of(k1_tab);
      for (const std::size_t k : idx) {
        const double lambda = grid.interior()[k];
        const cplx b_tab =
            tm_tab.nu0 - fourier_transform_at(tilde_tab, lambda, config.ft_tol);
        max_dev = std::max(max_dev, std::abs(b_tab - b.values[k]));
      }
      jverify["b_points_checked"] = idx.size();
      jverify["b_max_abs_deviation"] = max_dev;
      jverify["b_sup"] = sup_b;
      jverify["b_max_rel_deviation"] = sup_b > 0.0 ? max_dev / sup_b : 0.0;

      // transform evaluated at 0 against the moment route
      const cplx ft0 = fourier_transform_at(tilde_of(k1), 0.0, config.ft_tol);
      jverify["b_at_zero_identity"] = std::abs(tmoments.nu0 - ft0);
    }
    body["verify"] = jverify;
  }

  if (!warnings.empty()) body["warnings"] = warnings;
  return report;
}

ExitCode exit_code_for(const ReportDocument& report) {
  return report.case_label == CaseLabel::Unclassified ? ExitCode::Unclassified
                                                      : ExitCode::Ok;
}

}  // namespace wh
