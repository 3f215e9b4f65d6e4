#include "splinepred/parametrization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "splinepred/errors.hpp"

namespace splinepred {

bool ParamMatrix::in_index_set(std::size_t j) const {
  return std::binary_search(index_set.begin(), index_set.end(), j);
}

ParamMatrix analyze(const Matrix& theta, double tol_rel) {
  if (!theta.is_square()) throw DimensionError("analyze: parametrization must be square");
  const std::size_t l = theta.rows() == 0 ? 0 : theta.rows() - 1;
  Matrix basis = invert(theta, l);
  return analyze(theta, std::move(basis), tol_rel);
}

ParamMatrix analyze(Matrix theta, Matrix basis, double tol_rel) {
  if (!theta.is_square() || theta.rows() < 1)
    throw DimensionError("analyze: parametrization must be square and non-empty");
  if (basis.rows() != theta.rows() || basis.cols() != theta.cols())
    throw DimensionError("analyze: basis shape differs from parametrization");
  if (!(tol_rel > 0.0)) throw ConfigError("analyze: tolerance must be positive");

  ParamMatrix pm;
  pm.level = theta.rows() - 1;
  pm.tolerance = tol_rel;
  const double root = std::sqrt(static_cast<double>(theta.rows()));
  pm.trend_products.resize(theta.rows());
  for (std::size_t j = 0; j < theta.rows(); ++j) {
    auto row = theta.row(j);
    const double trend = std::accumulate(row.begin(), row.end(), 0.0);
    const double norm = std::sqrt(dot(row, row));
    const double threshold = tol_rel * root * norm;
    pm.trend_products[j] = trend;
    if (std::abs(trend) > threshold) pm.index_set.push_back(j);
    if (std::abs(trend) <= 10.0 * threshold && std::abs(trend) > threshold / 10.0)
      pm.near_threshold.push_back(j);
  }
  if (pm.index_set.empty())
    throw SingularMatrixError("analyze: no row is correlated with the constant trend at level " +
                                  std::to_string(pm.level),
                              pm.level);
  pm.theta = std::move(theta);
  pm.basis = std::move(basis);
  return pm;
}

double WeightRow::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double WeightRow::apply(std::span<const double> s) const {
  if (s.size() != weights.size())
    throw DimensionError("weight row of length " + std::to_string(weights.size()) +
                         " applied to data of length " + std::to_string(s.size()));
  return dot(weights, s);
}

WeightRow conservative_row(const ParamMatrix& pm, std::size_t j) {
  if (!pm.in_index_set(j))
    throw NotCorrelatedError("row " + std::to_string(j) + " at level " +
                             std::to_string(pm.level) +
                             " is not correlated with the constant trend");
  WeightRow w;
  w.level = pm.level;
  auto row = pm.theta.row(j);
  const double t = pm.trend_products[j];
  w.weights.resize(row.size());
  std::transform(row.begin(), row.end(), w.weights.begin(), [t](double x) { return x / t; });
  w.source.row = j;
  return w;
}

double trend_identity_residual(const ParamMatrix& pm) {
  double worst = 0.0;
  for (std::size_t i = 0; i <= pm.level; ++i) {
    double s = 0.0;
    for (std::size_t j : pm.index_set) s += pm.trend_products[j] * pm.basis(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

Decomposition decompose(const ParamMatrix& pm, std::span<const double> s) {
  if (s.size() != pm.level + 1)
    throw DimensionError("decompose: vector of length " + std::to_string(s.size()) +
                         " at level " + std::to_string(pm.level));
  Decomposition d{std::vector<double>(s.size(), 0.0), std::vector<double>(s.size(), 0.0)};
  for (std::size_t j = 0; j <= pm.level; ++j) {
    const double coord = dot(pm.theta.row(j), s);
    auto& target = pm.in_index_set(j) ? d.bulk : d.residual;
    for (std::size_t i = 0; i <= pm.level; ++i) target[i] += coord * pm.basis(i, j);
  }
  return d;
}

std::vector<double> reconstruct(const ParamMatrix& pm, std::span<const double> s) {
  Decomposition d = decompose(pm, s);
  for (std::size_t i = 0; i < d.bulk.size(); ++i) d.bulk[i] += d.residual[i];
  return d.bulk;
}

}  // namespace splinepred
