#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wh/pipeline.hpp"
#include "wh/version.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw wh::SchemaError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw wh::SchemaError(path + ": " + e.what());
  }
  return j;
}

int run_command(wh::Command cmd, const std::string& spec_path,
                const std::string& config_path, const std::string& rhs_path,
                bool manufactured, const std::string& out_dir, int grid_override,
                double tol_zero_override, bool plot_csv) {
  wh::AnalysisConfig config;
  if (!config_path.empty()) config = wh::AnalysisConfig::from_json(load_json(config_path));
  if (grid_override > 0) config.grid_n = grid_override;
  if (tol_zero_override > 0) config.tol_zero = tol_zero_override;

  const wh::KernelSpec spec = wh::parse_kernel_spec(load_json(spec_path));

  std::optional<wh::GridFunction> rhs;
  if (!rhs_path.empty()) {
    std::ifstream in(rhs_path);
    if (!in) throw wh::SchemaError("cannot open " + rhs_path);
    rhs = wh::read_grid_csv(in);
  }

  const wh::ReportDocument report =
      wh::run(cmd, config, spec, rhs, manufactured, plot_csv);

  if (out_dir.empty()) {
    std::cout << report.dump();
  } else {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "report.json");
    out << report.dump();
    for (const auto& [name, content] : report.sidecars) {
      std::ofstream side(fs::path(out_dir) / name);
      side << content;
    }
    std::cout << "case=" << wh::case_name(report.case_label);
    if (report.solvability) {
      std::cout << " kappa=" << report.solvability->kappa
                << " dim_ker=" << report.solvability->dim_ker
                << " dim_coker=" << report.solvability->dim_coker;
    }
    std::cout << " report=" << (fs::path(out_dir) / "report.json").string() << "\n";
  }
  return int(wh::exit_code_for(report));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(wh::kToolName) +
               " — solvability analysis for first-kind Wiener-Hopf integral equations"};
  app.set_version_flag("--version", std::string(wh::kToolVersion));
  app.require_subcommand(1);

  std::string spec_path, config_path, rhs_path, out_dir;
  bool manufactured = false, plot_csv = false;
  int grid_override = 0;
  double tol_zero_override = 0.0;

  auto add_common = [&](CLI::App* sub, bool with_rhs) {
    sub->add_option("--spec", spec_path, "kernel spec file (JSON)")->required();
    sub->add_option("--config", config_path, "analysis config file (JSON)");
    sub->add_option("--out", out_dir, "output directory for report.json and CSVs");
    sub->add_option("--grid", grid_override, "lambda grid size (power of two)");
    sub->add_option("--tol-zero", tol_zero_override, "zero band for the nu1 trichotomy");
    sub->add_flag("--plot-csv", plot_csv, "emit symbol sample CSVs");
    if (with_rhs) {
      sub->add_option("--rhs", rhs_path, "right-hand side as grid CSV (t,value)");
      sub->add_flag("--manufactured", manufactured,
                    "manufacture f from phi* = exp(-t) instead of --rhs");
    }
  };

  CLI::App* analyze = app.add_subcommand("analyze", "moments, conditions, symbols, windings");
  CLI::App* classify = app.add_subcommand("classify", "analyze plus the solvability report");
  CLI::App* solve = app.add_subcommand("solve", "classify plus a regularized solve");
  CLI::App* verify = app.add_subcommand("verify", "classify plus dual-route cross-checks");
  add_common(analyze, false);
  add_common(classify, false);
  add_common(solve, true);
  add_common(verify, false);

  CLI11_PARSE(app, argc, argv);

  wh::Command cmd = wh::Command::Analyze;
  if (classify->parsed()) cmd = wh::Command::Classify;
  if (solve->parsed()) cmd = wh::Command::Solve;
  if (verify->parsed()) cmd = wh::Command::Verify;

  try {
    return run_command(cmd, spec_path, config_path, rhs_path, manufactured, out_dir,
                       grid_override, tol_zero_override, plot_csv);
  } catch (const wh::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(wh::ExitCode::BadInput);
  } catch (const wh::VanishingSymbol& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(wh::ExitCode::VanishingSymbol);
  } catch (const wh::IndexMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(wh::ExitCode::IndexMismatch);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(wh::ExitCode::Failure);
  }
}
