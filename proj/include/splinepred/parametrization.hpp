#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splinepred/linalg.hpp"

namespace splinepred {

inline constexpr double kDefaultTrendTolerance = 1e-10;

/// An invertible Theta^(l) together with its basis B^(l) = Theta^(l)^{-1}
/// and the rows correlated with the constant trend.
struct ParamMatrix {
  std::size_t level = 0;
  Matrix theta;
  Matrix basis;
  /// theta_j . 1 for j = 0..l
  std::vector<double> trend_products;
  /// I(l), ascending: rows with |theta_j . 1| > tol * sqrt(l+1) * ||theta_j||_2
  std::vector<std::size_t> index_set;
  /// Rows whose |theta_j . 1| lies within 10x of the zero threshold.
  std::vector<std::size_t> near_threshold;
  double tolerance = kDefaultTrendTolerance;

  bool in_index_set(std::size_t j) const;
};

ParamMatrix analyze(const Matrix& theta, double tol_rel = kDefaultTrendTolerance);
/// Same, with a basis already known (e.g. Theta = M^{-1}, B = M).
ParamMatrix analyze(Matrix theta, Matrix basis, double tol_rel = kDefaultTrendTolerance);

/// Where a weight row came from, for reports.
struct RowSource {
  std::string family;
  std::optional<std::size_t> row;  // set when the weights are a single normalized row
  std::string criterion;
};

/// Conservative row at level l: l+1 weights summing to 1, possibly negative.
struct WeightRow {
  std::size_t level = 0;
  std::vector<double> weights;
  RowSource source;

  double sum() const;
  /// Weighted mean of s(0..l), i.e. the one-step-ahead prediction of s(l+1).
  double apply(std::span<const double> s) const;
};

/// theta_j / (theta_j . 1). Throws NotCorrelatedError when j is not in I(l).
WeightRow conservative_row(const ParamMatrix& pm, std::size_t j);

/// max_i | sum_{j in I(l)} (theta_j . 1) b_ij - 1 |
double trend_identity_residual(const ParamMatrix& pm);

/// sum_j (theta_j . s) b_j, which reproduces s.
std::vector<double> reconstruct(const ParamMatrix& pm, std::span<const double> s);

/// Bulk (j in I(l)) and residual (j not in I(l)) parts of reconstruct().
struct Decomposition {
  std::vector<double> bulk;
  std::vector<double> residual;
};
Decomposition decompose(const ParamMatrix& pm, std::span<const double> s);

}  // namespace splinepred
