#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "splinepred/criteria.hpp"
#include "splinepred/energy.hpp"
#include "splinepred/spline.hpp"
#include "splinepred/tournament.hpp"

namespace splinepred {

inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { Json, Csv };

struct RunConfig {
  std::string input;
  std::size_t lag = kDefaultLag;
  std::vector<Norm> qs{kAllNorms.begin(), kAllNorms.end()};
  std::vector<FamilyId> families{kAllFamilies.begin(), kAllFamilies.end()};
  double tol_rel = kDefaultTrendTolerance;
  ReportFormat format = ReportFormat::Json;
  bool full_precision = false;

  std::optional<std::string> weights_dir;
  std::optional<std::size_t> basis_level;
  std::string basis_dir = ".";
  std::optional<std::string> spline_path;
  std::size_t spline_resolution = 10;  // samples per unit interval
  std::optional<std::string> svg_dir;

  /// Throws ConfigError for an empty q or family set, duplicates, bad lag/tolerance.
  void validate() const;
};

/// Reads a `year,value` CSV with strictly consecutive years. `min_rows` is the
/// minimum number of data rows (L + 2 for a lag L run).
SeriesData ingest_csv(const std::string& path, std::size_t min_rows = 2);

/// FNV-1a 64-bit digest of the file's bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

struct ReportRow {
  Norm q = Norm::L1;
  FamilyId family = FamilyId::M;
  CriterionId criterion;
  double cost = 0.0;
  /// Costs of S_1..S_7 for the winning family.
  std::array<double, 7> stage_costs{};
  std::size_t backtest_index = 0;  // n
  int backtest_year = 0;
  double backtest_prediction = 0.0;
  double true_value = 0.0;
  std::size_t forecast_index = 0;  // n + 1
  int forecast_year = 0;
  double forecast = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct RunReport {
  // provenance
  std::string version = kVersion;
  std::string input_file;  // basename only
  std::string input_digest;
  int start_year = 0;
  std::size_t n = 0;
  // config echo
  std::size_t lag = kDefaultLag;
  std::vector<Norm> qs;
  std::vector<FamilyId> families;
  double tol_rel = kDefaultTrendTolerance;
  bool full_precision = false;

  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Everything a run produced; the report plus the data needed for plot dumps.
struct RunOutcome {
  RunReport report;
  SeriesData series;
  std::vector<TournamentResult> results;  // one per q, config order
  std::vector<AnalyzedFamily> families;   // config order
};

RunOutcome run_detailed(const RunConfig& config);
RunReport run(const RunConfig& config);

/// Rounds to 7 significant digits (the report's default numeric precision).
double round_significant(double x, int digits = 7);

std::string to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);
std::string to_csv(const RunReport& report);
RunReport report_from_csv(const std::string& text);

/// Writes the files requested in `config` (weights, basis, spline samples, SVG).
/// Returns the paths written.
std::vector<std::string> emit_plot_data(const RunOutcome& outcome, const RunConfig& config);

/// CSV of a matrix at full precision, one row per line.
std::string matrix_csv(const Matrix& m);

}  // namespace splinepred
