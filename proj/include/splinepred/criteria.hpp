#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splinepred/parametrization.hpp"

namespace splinepred {

/// Exponent of an l_q norm or of the prediction cost: 1, 2 or infinity.
enum class Norm { L1, L2, Inf };

inline constexpr std::array<Norm, 3> kAllNorms{Norm::L1, Norm::L2, Norm::Inf};

std::string_view norm_name(Norm q);  // "1", "2", "inf"
std::optional<Norm> parse_norm(std::string_view text);

enum class CriterionKind { U, MEAN, TAIL1, TAIL2, MAXCOR, NEAR_U, VAR, FD };

std::string_view kind_name(CriterionKind kind);
std::optional<CriterionKind> parse_kind(std::string_view name);

/// A selection criterion with its hyperparameters. `u` is used by U, TAIL1,
/// TAIL2, VAR and FD; `v` only by FD; `q1` only by NEAR_U. Unused fields stay
/// at their defaults so equality is meaningful.
struct CriterionId {
  CriterionKind kind = CriterionKind::MEAN;
  std::size_t u = 0;
  std::size_t v = 0;
  Norm q1 = Norm::L1;

  static CriterionId s_u(std::size_t u) { return {CriterionKind::U, u, 0, Norm::L1}; }
  static CriterionId mean() { return {CriterionKind::MEAN, 0, 0, Norm::L1}; }
  static CriterionId tail1(std::size_t u) { return {CriterionKind::TAIL1, u, 0, Norm::L1}; }
  static CriterionId tail2(std::size_t u) { return {CriterionKind::TAIL2, u, 0, Norm::L1}; }
  static CriterionId maxcor() { return {CriterionKind::MAXCOR, 0, 0, Norm::L1}; }
  static CriterionId near_uniform(Norm q1) { return {CriterionKind::NEAR_U, 0, 0, q1}; }
  static CriterionId var(std::size_t u) { return {CriterionKind::VAR, u, 0, Norm::L1}; }
  static CriterionId fd(std::size_t u, std::size_t v) { return {CriterionKind::FD, u, v, Norm::L1}; }

  bool uses_u() const noexcept;
  bool uses_v() const noexcept { return kind == CriterionKind::FD; }
  bool uses_q1() const noexcept { return kind == CriterionKind::NEAR_U; }
  bool needs_data() const noexcept {
    return kind == CriterionKind::VAR || kind == CriterionKind::FD;
  }

  /// e.g. "S_tail2(u=86)", "S_fd(u=93,v=5)", "S_nearU(q1=inf)", "S_mean"
  std::string label() const;

  friend bool operator==(const CriterionId&, const CriterionId&) = default;
};

/// Mean and (signed) variance of s(0..l) with respect to a conservative row.
struct WeightedStats {
  double mean = 0.0;
  double variance = 0.0;
};

WeightedStats weighted_stats(const WeightRow& w, std::span<const double> s);

/// Values within this relative distance of an extremum join the argmax/argmin set.
inline constexpr double kTieTolerance = 1e-9;

/// Data-independent quantities of the normalized rows at one level, indexed by
/// position k into the ascending index set I(l).
struct LevelRows {
  std::size_t level = 0;
  std::vector<std::size_t> index_set;
  std::vector<std::vector<double>> normalized;
  /// |theta_j . 1| / (sqrt(l+1) ||theta_j||)
  std::vector<double> correlation;
  /// tail_sum[k][i] = sum of normalized[k][i..l]
  std::vector<std::vector<double>> tail_sum;
  /// tail_max[k][i] = max of normalized[k][i..l]
  std::vector<std::vector<double>> tail_max;
  /// distance of each normalized row to the uniform row, per Norm
  std::array<std::vector<double>, 3> uniform_distance;

  std::size_t card() const noexcept { return index_set.size(); }
};

LevelRows make_level_rows(const ParamMatrix& pm);

/// Positions attaining the max (resp. min) within kTieTolerance.
std::vector<std::size_t> argmax_set(std::span<const double> scores);
std::vector<std::size_t> argmin_set(std::span<const double> scores);

// Selection rules, returning positions into LevelRows::index_set.
std::size_t select_u(const LevelRows& rows, std::size_t u);
std::vector<std::size_t> select_all(const LevelRows& rows);
std::vector<std::size_t> select_tail1(const LevelRows& rows, std::size_t u);
std::vector<std::size_t> select_tail2(const LevelRows& rows, std::size_t u);
std::vector<std::size_t> select_maxcor(const LevelRows& rows);
std::vector<std::size_t> select_near_uniform(const LevelRows& rows, Norm q1);

/// Weighted means theta_j s / theta_j 1 of every normalized row.
std::vector<double> row_means(const LevelRows& rows, std::span<const double> s);
/// var(l, j) of every normalized row.
std::vector<double> row_variances(const LevelRows& rows, std::span<const double> s);

/// Positions sorted by ascending key, equal keys by ascending j ("first element").
std::vector<std::size_t> ordered_positions(std::span<const double> keys);

/// Order by var(l, j).
std::vector<std::size_t> variance_order(const LevelRows& rows, std::span<const double> s);
/// Order by |theta_j s / theta_j 1 - s(anchor)|.
std::vector<std::size_t> distance_order(const LevelRows& rows, std::span<const double> s,
                                        std::size_t anchor);

/// Average of the normalized rows at `positions`.
WeightRow average_rows(const LevelRows& rows, std::span<const std::size_t> positions);

WeightRow s_u(const ParamMatrix& pm, std::size_t u);
WeightRow s_mean(const ParamMatrix& pm);
WeightRow s_tail1(const ParamMatrix& pm, std::size_t u);
WeightRow s_tail2(const ParamMatrix& pm, std::size_t u);
WeightRow s_maxcor(const ParamMatrix& pm);
WeightRow s_near_uniform(const ParamMatrix& pm, Norm q1);
WeightRow s_var(const ParamMatrix& pm, std::span<const double> s, std::size_t u);
WeightRow s_fd(const ParamMatrix& pm, std::span<const double> s, std::size_t u, std::size_t v);

/// Dispatches on id.kind. `s` must be s(0..l) for data-dependent kinds and
/// is ignored otherwise.
WeightRow apply_criterion(const ParamMatrix& pm, const CriterionId& id,
                          std::span<const double> s);
WeightRow apply_criterion(const LevelRows& rows, const CriterionId& id,
                          std::span<const double> s);

}  // namespace splinepred
