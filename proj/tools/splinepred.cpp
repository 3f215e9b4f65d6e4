// Command-line driver: `predict` runs the tournament on a year,value CSV and
// prints a report; `matrices` dumps the energy matrices of one level.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splinepred/energy.hpp"
#include "splinepred/errors.hpp"
#include "splinepred/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIngestion = 3;
constexpr int kExitNumerical = 4;

int exit_code(splinepred::ErrorCategory c) {
  switch (c) {
    case splinepred::ErrorCategory::Config: return kExitConfig;
    case splinepred::ErrorCategory::Ingestion: return kExitIngestion;
    case splinepred::ErrorCategory::Numerical: return kExitNumerical;
  }
  return 1;
}

const char* category_tag(splinepred::ErrorCategory c) {
  switch (c) {
    case splinepred::ErrorCategory::Config: return "config";
    case splinepred::ErrorCategory::Ingestion: return "ingestion";
    case splinepred::ErrorCategory::Numerical: return "singularity";
  }
  return "error";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw splinepred::ConfigError("cannot write " + path);
  out << text;
}

int run_predict(const splinepred::RunConfig& config, const std::string& output) {
  const splinepred::RunOutcome outcome = splinepred::run_detailed(config);
  for (const auto& w : outcome.report.warnings) std::cerr << "warning: " << w << "\n";
  splinepred::emit_plot_data(outcome, config);
  write_output(config.format == splinepred::ReportFormat::Json
                   ? splinepred::to_json(outcome.report)
                   : splinepred::to_csv(outcome.report),
               output);
  return 0;
}

int run_matrices(std::size_t level, const std::string& family, const std::string& output) {
  const splinepred::EnergyMatrixPair pair = splinepred::assemble_energy(level);
  std::string text;
  if (family.empty()) {
    text = "# M level " + std::to_string(level) + "\n" + splinepred::matrix_csv(pair.m) +
           "\n# S level " + std::to_string(level) + "\n" + splinepred::matrix_csv(pair.s);
  } else {
    const auto id = splinepred::parse_family_tag(family);
    if (!id) throw splinepred::ConfigError("unknown family '" + family + "'");
    const splinepred::ParamFamily fam = splinepred::build_family(*id, level);
    text = "# " + family + " level " + std::to_string(level) + "\n" +
           splinepred::matrix_csv(fam.at_level(level));
  }
  write_output(text, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-value prediction from conservative weight rows of spline energy matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(splinepred::kVersion));

  splinepred::RunConfig config;
  std::string q_list = "1,2,inf";
  std::string family_list = "M,Mt,Minv,Minvt,S,Sinv";
  std::string format = "json";
  std::string output;
  std::size_t basis_level = 0;
  std::string weights_dir, spline_path, svg_dir;

  auto* predict = app.add_subcommand("predict", "Run the tournament and report predictions");
  predict->add_option("--input", config.input, "CSV with header year,value")->required();
  predict->add_option("--lag", config.lag, "First scored level L")->capture_default_str();
  predict->add_option("--q", q_list, "Cost exponents, subset of 1,2,inf")->capture_default_str();
  predict->add_option("--families", family_list, "Subset of M,Mt,Minv,Minvt,S,Sinv")
      ->capture_default_str();
  predict->add_option("--tol", config.tol_rel, "Relative zero threshold for theta_j . 1")
      ->capture_default_str();
  predict->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  predict->add_option("--output,-o", output, "Report path (default stdout)");
  predict->add_option("--emit-weights", weights_dir, "Directory for final weight rows per q");
  predict->add_option("--emit-basis", basis_level, "Dump basis columns b_j at this level");
  predict->add_option("--basis-dir", config.basis_dir, "Directory for basis dumps")
      ->capture_default_str();
  predict->add_option("--emit-spline", spline_path, "CSV of spline samples (t, s(t))");
  predict->add_option("--spline-resolution", config.spline_resolution,
                      "Spline samples per unit interval")
      ->capture_default_str();
  predict->add_option("--emit-svg", svg_dir, "Directory for minimal SVG charts");
  predict->add_flag("--full-precision", config.full_precision,
                    "Report full double precision instead of 7 significant digits");

  std::size_t level = 1;
  std::string family;
  auto* matrices = app.add_subcommand("matrices", "Dump M and S (or one family's matrix)");
  matrices->add_option("--level", level, "Level l >= 1")->required();
  matrices->add_option("--family", family, "One of M,Mt,Minv,Minvt,S,Sinv");
  matrices->add_option("--output,-o", output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*matrices) {
      if (level < 1) throw splinepred::ConfigError("--level must be >= 1");
      return run_matrices(level, family, output);
    }

    config.qs.clear();
    for (const auto& q : split_list(q_list)) {
      const auto norm = splinepred::parse_norm(q);
      if (!norm) throw splinepred::ConfigError("unknown q '" + q + "'");
      config.qs.push_back(*norm);
    }
    config.families.clear();
    for (const auto& f : split_list(family_list)) {
      const auto id = splinepred::parse_family_tag(f);
      if (!id) throw splinepred::ConfigError("unknown family '" + f + "'");
      config.families.push_back(*id);
    }
    config.format = format == "csv" ? splinepred::ReportFormat::Csv : splinepred::ReportFormat::Json;
    if (!weights_dir.empty()) config.weights_dir = weights_dir;
    if (predict->count("--emit-basis")) config.basis_level = basis_level;
    if (!spline_path.empty()) config.spline_path = spline_path;
    if (!svg_dir.empty()) config.svg_dir = svg_dir;
    return run_predict(config, output);
  } catch (const splinepred::Error& e) {
    std::cerr << "error [" << category_tag(e.category()) << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
