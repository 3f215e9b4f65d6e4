#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "splinepred/criteria.hpp"
#include "splinepred/energy.hpp"
#include "splinepred/parametrization.hpp"
#include "splinepred/spline.hpp"

namespace splinepred {

inline constexpr std::size_t kDefaultLag = 4;

/// One-step-ahead predictions of s(l+1) from s(0..l) for l = lag..n-1.
struct PredictorTrace {
  std::size_t lag = 0;
  std::vector<double> predictions;  // predictions[l - lag]
  CriterionId criterion;
  FamilyId family = FamilyId::M;
};

struct CostReport {
  Norm q = Norm::L1;
  std::size_t lag = 0;
  double value = 0.0;
};

/// Mean of |error|^q over levels lag..n-1 for q in {1, 2} (no root for q = 2),
/// max |error| for q = inf.
CostReport cost(const PredictorTrace& trace, const SeriesData& s, Norm q, std::size_t lag);
double cost_value(std::span<const double> predictions, std::span<const double> series, Norm q,
                  std::size_t lag);

/// A family analyzed level by level; levels[l-1] is Theta^(l).
struct AnalyzedFamily {
  FamilyId id = FamilyId::M;
  std::vector<ParamMatrix> levels;
  std::vector<std::string> warnings;

  std::size_t max_level() const noexcept { return levels.size(); }
  const ParamMatrix& at_level(std::size_t l) const { return levels.at(l - 1); }
};

AnalyzedFamily analyze_family(const ParamFamily& family, double tol_rel = kDefaultTrendTolerance);

/// Per-family, per-series cache that turns any criterion into its backtest
/// predictions by table lookups: normalized rows, their weighted means, the
/// variance ordering and the distance orderings for every anchor, all for
/// levels lag..n-1.
class CandidateEvaluator {
 public:
  CandidateEvaluator(const AnalyzedFamily& family, const SeriesData& series, std::size_t lag);

  const AnalyzedFamily& family() const noexcept { return *family_; }
  const SeriesData& series() const noexcept { return *series_; }
  std::size_t lag() const noexcept { return lag_; }
  /// n, the last observed index; hyperparameters range over 0..n.
  std::size_t horizon() const noexcept { return n_; }

  std::vector<double> predictions(const CriterionId& id) const;
  PredictorTrace trace(const CriterionId& id) const;
  CostReport evaluate(const CriterionId& id, Norm q) const;

  /// Weight row chosen by `id` at any level 1..n.
  WeightRow weight_row(const CriterionId& id, std::size_t level) const;

 private:
  struct Level {
    LevelRows rows;
    std::vector<double> means;
    std::vector<std::size_t> var_order;
    std::vector<std::vector<std::size_t>> fd_order;  // per anchor 0..l
  };
  double level_prediction(const Level& lv, const CriterionId& id) const;

  const AnalyzedFamily* family_;
  const SeriesData* series_;
  std::size_t lag_;
  std::size_t n_;
  std::vector<Level> levels_;  // levels_[l - lag]
};

struct ScanResult {
  CriterionId criterion;
  CostReport cost;
};

/// Best u in 0..n for kind in {U, TAIL1, TAIL2, VAR}; smallest u wins ties.
ScanResult optimize_u(const CandidateEvaluator& ev, CriterionKind kind, Norm q);
/// Best (u, v) on the (n+1)^2 grid; lexicographically smallest wins ties.
ScanResult optimize_uv_fd(const CandidateEvaluator& ev, Norm q);
/// Best q1 scanned in order 1, 2, inf; earlier wins ties.
ScanResult optimize_q1_near_uniform(const CandidateEvaluator& ev, Norm q);

struct StageResult {
  CriterionId challenger;
  double challenger_cost = 0.0;
  CriterionId winner;
  double cost = 0.0;
};

/// Stage k holds S_{k,q}. Each stage compares a challenger against the
/// incumbent (S_mean for stage 1, else the previous winner); the incumbent
/// keeps ties.
struct CascadeResult {
  FamilyId family = FamilyId::M;
  Norm q = Norm::L1;
  std::array<StageResult, 7> stages;

  const CriterionId& winner() const { return stages.back().winner; }
  double cost() const { return stages.back().cost; }
};

CascadeResult cascade(const CandidateEvaluator& ev, Norm q);

struct TournamentResult {
  Norm q = Norm::L1;
  std::size_t lag = 0;
  FamilyId family = FamilyId::M;
  CriterionId criterion;
  double cost = 0.0;
  /// Winning cascade, plus every family's cascade in input order.
  CascadeResult winning_cascade;
  std::vector<CascadeResult> family_cascades;
  /// Backtest predictions of the winner over levels lag..n-1.
  PredictorTrace trace;
  /// Prediction of s(n) from the level n-1 weights.
  double backtest_prediction = 0.0;
  /// Prediction of s(n+1) from the level n weights.
  double forecast = 0.0;
  WeightRow final_row;
};

/// Runs the cascade for every family and keeps the one with the smallest
/// stage-7 cost (earlier family wins ties).
TournamentResult select_parametrization(std::span<const CandidateEvaluator> evaluators, Norm q);

/// Owns evaluators for a family set so several q can reuse them. Families are
/// processed in parallel; results are independent of thread scheduling.
class Tournament {
 public:
  Tournament(std::vector<AnalyzedFamily> families, SeriesData series, std::size_t lag);
  // Evaluators point into families_ and series_.
  Tournament(const Tournament&) = delete;
  Tournament& operator=(const Tournament&) = delete;

  TournamentResult run(Norm q) const;
  const std::vector<AnalyzedFamily>& families() const noexcept { return families_; }
  const std::vector<CandidateEvaluator>& evaluators() const noexcept { return evaluators_; }

 private:
  std::vector<AnalyzedFamily> families_;
  SeriesData series_;
  std::size_t lag_;
  std::vector<CandidateEvaluator> evaluators_;
};

}  // namespace splinepred
