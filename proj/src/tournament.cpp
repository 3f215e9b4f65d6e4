#include "splinepred/tournament.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "splinepred/errors.hpp"
#include "splinepred/parallel.hpp"

namespace splinepred {

namespace {

void check_lag(std::size_t lag, std::size_t n) {
  if (lag < 1 || lag >= n)
    throw LagError("lag L = " + std::to_string(lag) + " must satisfy 1 <= L < n = " +
                   std::to_string(n));
}

}  // namespace

double cost_value(std::span<const double> predictions, std::span<const double> series, Norm q,
                  std::size_t lag) {
  if (series.size() < 2) throw DimensionError("cost: series too short");
  const std::size_t n = series.size() - 1;
  if (lag >= n)
    throw LagError("lag L = " + std::to_string(lag) + " must be below n = " + std::to_string(n));
  if (predictions.size() != n - lag)
    throw DimensionError("cost: expected " + std::to_string(n - lag) + " predictions, got " +
                         std::to_string(predictions.size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double e = std::abs(series[lag + k + 1] - predictions[k]);
    switch (q) {
      case Norm::L1: acc += e; break;
      case Norm::L2: acc += e * e; break;
      case Norm::Inf: acc = std::max(acc, e); break;
    }
  }
  if (q == Norm::Inf) return acc;
  return acc / static_cast<double>(n - lag);
}

CostReport cost(const PredictorTrace& trace, const SeriesData& s, Norm q, std::size_t lag) {
  if (trace.lag != lag) throw LagError("cost: trace starts at a different lag");
  return {q, lag, cost_value(trace.predictions, s.values, q, lag)};
}

AnalyzedFamily analyze_family(const ParamFamily& family, double tol_rel) {
  AnalyzedFamily out;
  out.id = family.id;
  out.warnings = family.warnings;
  out.levels.resize(family.max_level());
  parallel_for(family.max_level(), [&](std::size_t k) {
    out.levels[k] = analyze(family.theta[k], family.basis[k], tol_rel);
  });
  for (const ParamMatrix& pm : out.levels) {
    for (std::size_t j : pm.near_threshold)
      out.warnings.push_back("family " + std::string(family_tag(family.id)) + " level " +
                             std::to_string(pm.level) + ": row " + std::to_string(j) +
                             " trend product is within 10x of the zero threshold");
  }
  return out;
}

CandidateEvaluator::CandidateEvaluator(const AnalyzedFamily& family, const SeriesData& series,
                                       std::size_t lag)
    : family_(&family), series_(&series), lag_(lag), n_(series.last_index()) {
  check_lag(lag, n_);
  if (family.max_level() < n_)
    throw DimensionError("family " + std::string(family_tag(family.id)) + " built to level " +
                         std::to_string(family.max_level()) + " but the series needs level " +
                         std::to_string(n_));
  levels_.resize(n_ - lag_);
  for (std::size_t l = lag_; l < n_; ++l) {
    Level& lv = levels_[l - lag_];
    const auto prefix = series.prefix(l);
    lv.rows = make_level_rows(family.at_level(l));
    lv.means = row_means(lv.rows, prefix);
    lv.var_order = variance_order(lv.rows, prefix);
    lv.fd_order.reserve(l + 1);
    for (std::size_t anchor = 0; anchor <= l; ++anchor) {
      std::vector<double> dist(lv.means);
      for (double& d : dist) d = std::abs(d - prefix[anchor]);
      lv.fd_order.push_back(ordered_positions(dist));
    }
  }
}

double CandidateEvaluator::level_prediction(const Level& lv, const CriterionId& id) const {
  const std::size_t card = lv.rows.card();
  auto mean_of = [&](const std::vector<std::size_t>& ks) {
    double s = 0.0;
    for (std::size_t k : ks) s += lv.means[k];
    return s / static_cast<double>(ks.size());
  };
  switch (id.kind) {
    case CriterionKind::U: return lv.means[select_u(lv.rows, id.u)];
    case CriterionKind::MEAN: return mean_of(select_all(lv.rows));
    case CriterionKind::TAIL1: return mean_of(select_tail1(lv.rows, id.u));
    case CriterionKind::TAIL2: return mean_of(select_tail2(lv.rows, id.u));
    case CriterionKind::MAXCOR: return mean_of(select_maxcor(lv.rows));
    case CriterionKind::NEAR_U: return mean_of(select_near_uniform(lv.rows, id.q1));
    case CriterionKind::VAR: return lv.means[lv.var_order[std::min(id.u, card - 1)]];
    case CriterionKind::FD: {
      const auto& order = lv.fd_order[std::min(id.u, lv.rows.level)];
      return lv.means[order[std::min(id.v, card - 1)]];
    }
  }
  throw ConfigError("unknown criterion kind");
}

std::vector<double> CandidateEvaluator::predictions(const CriterionId& id) const {
  std::vector<double> out(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) out[k] = level_prediction(levels_[k], id);
  return out;
}

PredictorTrace CandidateEvaluator::trace(const CriterionId& id) const {
  return {lag_, predictions(id), id, family_->id};
}

CostReport CandidateEvaluator::evaluate(const CriterionId& id, Norm q) const {
  return {q, lag_, cost_value(predictions(id), series_->values, q, lag_)};
}

WeightRow CandidateEvaluator::weight_row(const CriterionId& id, std::size_t level) const {
  if (level < 1 || level > n_)
    throw DimensionError("weight_row: level " + std::to_string(level) + " outside 1.." +
                         std::to_string(n_));
  WeightRow w = apply_criterion(family_->at_level(level), id, series_->prefix(level));
  w.source.family = std::string(family_tag(family_->id));
  return w;
}

ScanResult optimize_u(const CandidateEvaluator& ev, CriterionKind kind, Norm q) {
  if (kind != CriterionKind::U && kind != CriterionKind::TAIL1 && kind != CriterionKind::TAIL2 &&
      kind != CriterionKind::VAR)
    throw ConfigError("optimize_u: criterion kind has no single u hyperparameter");
  CriterionId id{kind, 0, 0, Norm::L1};
  ScanResult best{id, ev.evaluate(id, q)};
  for (std::size_t u = 1; u <= ev.horizon(); ++u) {
    id.u = u;
    const CostReport c = ev.evaluate(id, q);
    if (c.value < best.cost.value) best = {id, c};
  }
  return best;
}

ScanResult optimize_uv_fd(const CandidateEvaluator& ev, Norm q) {
  ScanResult best{CriterionId::fd(0, 0), ev.evaluate(CriterionId::fd(0, 0), q)};
  for (std::size_t u = 0; u <= ev.horizon(); ++u) {
    for (std::size_t v = 0; v <= ev.horizon(); ++v) {
      const CriterionId id = CriterionId::fd(u, v);
      const CostReport c = ev.evaluate(id, q);
      if (c.value < best.cost.value) best = {id, c};
    }
  }
  return best;
}

ScanResult optimize_q1_near_uniform(const CandidateEvaluator& ev, Norm q) {
  ScanResult best{CriterionId::near_uniform(Norm::L1),
                  ev.evaluate(CriterionId::near_uniform(Norm::L1), q)};
  for (Norm q1 : {Norm::L2, Norm::Inf}) {
    const CriterionId id = CriterionId::near_uniform(q1);
    const CostReport c = ev.evaluate(id, q);
    if (c.value < best.cost.value) best = {id, c};
  }
  return best;
}

CascadeResult cascade(const CandidateEvaluator& ev, Norm q) {
  CascadeResult out;
  out.family = ev.family().id;
  out.q = q;

  auto play = [](const ScanResult& challenger, const CriterionId& incumbent,
                 double incumbent_cost) {
    StageResult st{challenger.criterion, challenger.cost.value, incumbent, incumbent_cost};
    if (challenger.cost.value < incumbent_cost) {
      st.winner = challenger.criterion;
      st.cost = challenger.cost.value;
    }
    return st;
  };

  const CriterionId mean = CriterionId::mean();
  out.stages[0] = play(optimize_u(ev, CriterionKind::U, q), mean, ev.evaluate(mean, q).value);

  const CriterionId maxcor = CriterionId::maxcor();
  const std::array<ScanResult, 6> challengers{
      optimize_u(ev, CriterionKind::TAIL1, q),
      optimize_u(ev, CriterionKind::TAIL2, q),
      ScanResult{maxcor, ev.evaluate(maxcor, q)},
      optimize_q1_near_uniform(ev, q),
      optimize_u(ev, CriterionKind::VAR, q),
      optimize_uv_fd(ev, q),
  };
  for (std::size_t k = 0; k < challengers.size(); ++k) {
    const StageResult& prev = out.stages[k];
    out.stages[k + 1] = play(challengers[k], prev.winner, prev.cost);
  }
  return out;
}

TournamentResult select_parametrization(std::span<const CandidateEvaluator> evaluators, Norm q) {
  if (evaluators.empty()) throw ConfigError("select_parametrization: no families given");

  std::vector<CascadeResult> cascades(evaluators.size());
  parallel_for(evaluators.size(), [&](std::size_t k) { cascades[k] = cascade(evaluators[k], q); });

  std::size_t best = 0;
  for (std::size_t k = 1; k < cascades.size(); ++k)
    if (cascades[k].cost() < cascades[best].cost()) best = k;

  const CandidateEvaluator& ev = evaluators[best];
  const std::size_t n = ev.horizon();
  TournamentResult r;
  r.q = q;
  r.lag = ev.lag();
  r.family = cascades[best].family;
  r.criterion = cascades[best].winner();
  r.cost = cascades[best].cost();
  r.winning_cascade = cascades[best];
  r.family_cascades = std::move(cascades);
  r.trace = ev.trace(r.criterion);
  r.backtest_prediction = ev.weight_row(r.criterion, n - 1).apply(ev.series().prefix(n - 1));
  r.final_row = ev.weight_row(r.criterion, n);
  r.forecast = r.final_row.apply(ev.series().prefix(n));
  return r;
}

Tournament::Tournament(std::vector<AnalyzedFamily> families, SeriesData series, std::size_t lag)
    : families_(std::move(families)), series_(std::move(series)), lag_(lag) {
  if (families_.empty()) throw ConfigError("tournament: no families given");
  check_lag(lag_, series_.last_index());
  std::vector<std::optional<CandidateEvaluator>> built(families_.size());
  parallel_for(families_.size(),
               [&](std::size_t k) { built[k].emplace(families_[k], series_, lag_); });
  evaluators_.reserve(built.size());
  for (auto& e : built) evaluators_.push_back(std::move(*e));
}

TournamentResult Tournament::run(Norm q) const { return select_parametrization(evaluators_, q); }

}  // namespace splinepred
