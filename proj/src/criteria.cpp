#include "splinepred/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "splinepred/errors.hpp"

namespace splinepred {

std::string_view norm_name(Norm q) {
  switch (q) {
    case Norm::L1: return "1";
    case Norm::L2: return "2";
    case Norm::Inf: return "inf";
  }
  return "?";
}

std::optional<Norm> parse_norm(std::string_view text) {
  if (text == "1") return Norm::L1;
  if (text == "2") return Norm::L2;
  if (text == "inf" || text == "+inf" || text == "infinity") return Norm::Inf;
  return std::nullopt;
}

std::string_view kind_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::U: return "S_u";
    case CriterionKind::MEAN: return "S_mean";
    case CriterionKind::TAIL1: return "S_tail1";
    case CriterionKind::TAIL2: return "S_tail2";
    case CriterionKind::MAXCOR: return "S_maxcor";
    case CriterionKind::NEAR_U: return "S_nearU";
    case CriterionKind::VAR: return "S_var";
    case CriterionKind::FD: return "S_fd";
  }
  return "?";
}

std::optional<CriterionKind> parse_kind(std::string_view name) {
  for (auto k : {CriterionKind::U, CriterionKind::MEAN, CriterionKind::TAIL1,
                 CriterionKind::TAIL2, CriterionKind::MAXCOR, CriterionKind::NEAR_U,
                 CriterionKind::VAR, CriterionKind::FD})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

bool CriterionId::uses_u() const noexcept {
  switch (kind) {
    case CriterionKind::U:
    case CriterionKind::TAIL1:
    case CriterionKind::TAIL2:
    case CriterionKind::VAR:
    case CriterionKind::FD: return true;
    default: return false;
  }
}

std::string CriterionId::label() const {
  std::string out(kind_name(kind));
  if (uses_v()) return out + "(u=" + std::to_string(u) + ",v=" + std::to_string(v) + ")";
  if (uses_u()) return out + "(u=" + std::to_string(u) + ")";
  if (uses_q1()) return out + "(q1=" + std::string(norm_name(q1)) + ")";
  return out;
}

WeightedStats weighted_stats(const WeightRow& w, std::span<const double> s) {
  const double mean = w.apply(s);
  double var = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] - mean;
    var += w.weights[i] * d * d;
  }
  return {mean, var};
}

namespace {

double lq_distance_to_uniform(std::span<const double> row, Norm q) {
  const double c = 1.0 / static_cast<double>(row.size());
  double acc = 0.0;
  for (double x : row) {
    const double d = std::abs(x - c);
    switch (q) {
      case Norm::L1: acc += d; break;
      case Norm::L2: acc += d * d; break;
      case Norm::Inf: acc = std::max(acc, d); break;
    }
  }
  return q == Norm::L2 ? std::sqrt(acc) : acc;
}

std::size_t clamp_index(std::size_t k, std::size_t card) { return std::min(k, card - 1); }

void check_prefix(const LevelRows& rows, std::span<const double> s) {
  if (s.size() != rows.level + 1)
    throw DimensionError("criterion at level " + std::to_string(rows.level) +
                         " needs data of length " + std::to_string(rows.level + 1) + ", got " +
                         std::to_string(s.size()));
}

WeightRow labelled(WeightRow w, const CriterionId& id) {
  w.source.criterion = id.label();
  return w;
}

}  // namespace

LevelRows make_level_rows(const ParamMatrix& pm) {
  LevelRows r;
  r.level = pm.level;
  r.index_set = pm.index_set;
  const std::size_t width = pm.level + 1;
  const double root = std::sqrt(static_cast<double>(width));
  for (std::size_t j : pm.index_set) {
    auto row = pm.theta.row(j);
    const double t = pm.trend_products[j];
    std::vector<double> w(width);
    std::transform(row.begin(), row.end(), w.begin(), [t](double x) { return x / t; });

    r.correlation.push_back(std::abs(t) / (root * std::sqrt(dot(row, row))));

    std::vector<double> tsum(width), tmax(width);
    double acc = 0.0;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = width; i-- > 0;) {
      acc += w[i];
      mx = std::max(mx, w[i]);
      tsum[i] = acc;
      tmax[i] = mx;
    }
    r.tail_sum.push_back(std::move(tsum));
    r.tail_max.push_back(std::move(tmax));
    for (Norm q : kAllNorms)
      r.uniform_distance[static_cast<std::size_t>(q)].push_back(lq_distance_to_uniform(w, q));
    r.normalized.push_back(std::move(w));
  }
  return r;
}

std::vector<std::size_t> argmax_set(std::span<const double> scores) {
  const double best = *std::max_element(scores.begin(), scores.end());
  const double tol = kTieTolerance * (1.0 + std::abs(best));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < scores.size(); ++k)
    if (best - scores[k] <= tol) out.push_back(k);
  return out;
}

std::vector<std::size_t> argmin_set(std::span<const double> scores) {
  const double best = *std::min_element(scores.begin(), scores.end());
  const double tol = kTieTolerance * (1.0 + std::abs(best));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < scores.size(); ++k)
    if (scores[k] - best <= tol) out.push_back(k);
  return out;
}

std::size_t select_u(const LevelRows& rows, std::size_t u) { return clamp_index(u, rows.card()); }

std::vector<std::size_t> select_all(const LevelRows& rows) {
  std::vector<std::size_t> all(rows.card());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::vector<std::size_t> select_tail1(const LevelRows& rows, std::size_t u) {
  const std::size_t start = std::min(u, rows.level);
  std::vector<double> scores(rows.card());
  for (std::size_t k = 0; k < rows.card(); ++k) scores[k] = rows.tail_sum[k][start];
  return argmax_set(scores);
}

std::vector<std::size_t> select_tail2(const LevelRows& rows, std::size_t u) {
  const std::size_t start = std::min(u, rows.level);
  std::vector<double> scores(rows.card());
  for (std::size_t k = 0; k < rows.card(); ++k) scores[k] = rows.tail_max[k][start];
  return argmax_set(scores);
}

std::vector<std::size_t> select_maxcor(const LevelRows& rows) {
  return argmax_set(rows.correlation);
}

std::vector<std::size_t> select_near_uniform(const LevelRows& rows, Norm q1) {
  return argmin_set(rows.uniform_distance[static_cast<std::size_t>(q1)]);
}

std::vector<double> row_means(const LevelRows& rows, std::span<const double> s) {
  check_prefix(rows, s);
  std::vector<double> means(rows.card());
  for (std::size_t k = 0; k < rows.card(); ++k) means[k] = dot(rows.normalized[k], s);
  return means;
}

std::vector<double> row_variances(const LevelRows& rows, std::span<const double> s) {
  const std::vector<double> means = row_means(rows, s);
  std::vector<double> vars(rows.card(), 0.0);
  for (std::size_t k = 0; k < rows.card(); ++k) {
    const auto& w = rows.normalized[k];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double d = s[i] - means[k];
      vars[k] += w[i] * d * d;
    }
  }
  return vars;
}

std::vector<std::size_t> ordered_positions(std::span<const double> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

std::vector<std::size_t> variance_order(const LevelRows& rows, std::span<const double> s) {
  return ordered_positions(row_variances(rows, s));
}

std::vector<std::size_t> distance_order(const LevelRows& rows, std::span<const double> s,
                                        std::size_t anchor) {
  std::vector<double> dist = row_means(rows, s);
  const double target = s[std::min(anchor, rows.level)];
  for (double& d : dist) d = std::abs(d - target);
  return ordered_positions(dist);
}

WeightRow average_rows(const LevelRows& rows, std::span<const std::size_t> positions) {
  if (positions.empty()) throw DimensionError("average_rows: empty selection");
  WeightRow w;
  w.level = rows.level;
  if (positions.size() == 1) {
    w.weights = rows.normalized[positions[0]];
    w.source.row = rows.index_set[positions[0]];
    return w;
  }
  w.weights.assign(rows.level + 1, 0.0);
  for (std::size_t k : positions)
    for (std::size_t i = 0; i <= rows.level; ++i) w.weights[i] += rows.normalized[k][i];
  const double count = static_cast<double>(positions.size());
  for (double& x : w.weights) x /= count;
  return w;
}

WeightRow apply_criterion(const LevelRows& rows, const CriterionId& id,
                          std::span<const double> s) {
  auto single = [&](std::size_t k) { return average_rows(rows, std::span(&k, 1)); };
  switch (id.kind) {
    case CriterionKind::U: return labelled(single(select_u(rows, id.u)), id);
    case CriterionKind::MEAN: return labelled(average_rows(rows, select_all(rows)), id);
    case CriterionKind::TAIL1: return labelled(average_rows(rows, select_tail1(rows, id.u)), id);
    case CriterionKind::TAIL2: return labelled(average_rows(rows, select_tail2(rows, id.u)), id);
    case CriterionKind::MAXCOR: return labelled(average_rows(rows, select_maxcor(rows)), id);
    case CriterionKind::NEAR_U:
      return labelled(average_rows(rows, select_near_uniform(rows, id.q1)), id);
    case CriterionKind::VAR: {
      check_prefix(rows, s);
      const auto order = variance_order(rows, s);
      return labelled(single(order[clamp_index(id.u, rows.card())]), id);
    }
    case CriterionKind::FD: {
      check_prefix(rows, s);
      const auto order = distance_order(rows, s, std::min(rows.level, id.u));
      return labelled(single(order[clamp_index(id.v, rows.card())]), id);
    }
  }
  throw ConfigError("unknown criterion kind");
}

WeightRow apply_criterion(const ParamMatrix& pm, const CriterionId& id,
                          std::span<const double> s) {
  return apply_criterion(make_level_rows(pm), id, s);
}

WeightRow s_u(const ParamMatrix& pm, std::size_t u) {
  return apply_criterion(pm, CriterionId::s_u(u), {});
}
WeightRow s_mean(const ParamMatrix& pm) { return apply_criterion(pm, CriterionId::mean(), {}); }
WeightRow s_tail1(const ParamMatrix& pm, std::size_t u) {
  return apply_criterion(pm, CriterionId::tail1(u), {});
}
WeightRow s_tail2(const ParamMatrix& pm, std::size_t u) {
  return apply_criterion(pm, CriterionId::tail2(u), {});
}
WeightRow s_maxcor(const ParamMatrix& pm) {
  return apply_criterion(pm, CriterionId::maxcor(), {});
}
WeightRow s_near_uniform(const ParamMatrix& pm, Norm q1) {
  return apply_criterion(pm, CriterionId::near_uniform(q1), {});
}
WeightRow s_var(const ParamMatrix& pm, std::span<const double> s, std::size_t u) {
  return apply_criterion(pm, CriterionId::var(u), s);
}
WeightRow s_fd(const ParamMatrix& pm, std::span<const double> s, std::size_t u, std::size_t v) {
  return apply_criterion(pm, CriterionId::fd(u, v), s);
}

}  // namespace splinepred
