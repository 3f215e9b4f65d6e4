#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "splinepred/criteria.hpp"
#include "splinepred/energy.hpp"
#include "splinepred/errors.hpp"

using namespace splinepred;

namespace {

const Matrix kS1{{1.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 3}};
const Matrix kS1Inv{{4, -2}, {-2, 4}};

void check_weights(const WeightRow& w, const std::vector<double>& want, double tol = 1e-12) {
  REQUIRE(w.weights.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(w.weights[i] - want[i]) <= tol);
}

std::vector<double> uniform(std::size_t l) { return std::vector<double>(l + 1, 1.0 / (l + 1)); }

std::vector<double> indicator(std::size_t l, std::size_t k) {
  std::vector<double> e(l + 1, 0.0);
  e[k] = 1.0;
  return e;
}

WeightRow from_weights(std::vector<double> w) { return {w.size() - 1, std::move(w), {}}; }

std::vector<CriterionId> sample_criteria(std::size_t n) {
  std::vector<CriterionId> out{CriterionId::mean(), CriterionId::maxcor()};
  for (Norm q1 : kAllNorms) out.push_back(CriterionId::near_uniform(q1));
  for (std::size_t u = 0; u <= n; ++u) {
    out.push_back(CriterionId::s_u(u));
    out.push_back(CriterionId::tail1(u));
    out.push_back(CriterionId::tail2(u));
    out.push_back(CriterionId::var(u));
    for (std::size_t v = 0; v <= n; ++v) out.push_back(CriterionId::fd(u, v));
  }
  return out;
}

}  // namespace

TEST_CASE("weighted_stats examples") {
  auto st = weighted_stats(from_weights({0.5, 0.5}), std::vector<double>{0, 2});
  CHECK(st.mean == 1.0);
  CHECK(st.variance == 1.0);
  st = weighted_stats(from_weights({1, 0}), std::vector<double>{5, 9});
  CHECK(st.mean == 5.0);
  CHECK(st.variance == 0.0);
  st = weighted_stats(from_weights({2, -1}), std::vector<double>{1, 2});
  CHECK(st.mean == 0.0);
  CHECK(st.variance == -2.0);
  CHECK_THROWS_AS(weighted_stats(from_weights({1, 0}), std::vector<double>{1, 2, 3}),
                  DimensionError);
}

TEST_CASE("weighted_stats: second moment splits into mean^2 + variance") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 10;
    auto w = oracle::random_vector(rng, n, -2, 2);
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    const auto s = oracle::random_vector(rng, n, -5, 5);
    const auto st = weighted_stats(from_weights(w), s);
    double second = 0.0;
    for (std::size_t i = 0; i < n; ++i) second += w[i] * s[i] * s[i];
    CHECK(std::abs(second - (st.mean * st.mean + st.variance)) <= 1e-9 * (1 + std::abs(second)));
  }
}

TEST_CASE("s_u: first row, clamping and extrapolation row") {
  const auto id = analyze(Matrix::identity(2));
  check_weights(s_u(id, 0), {1, 0});
  check_weights(s_u(id, 99), {0, 1});
  check_weights(s_u(analyze(kS1Inv), 1), {-1, 2});
}

TEST_CASE("s_mean: canonical rows average to the uniform row") {
  for (std::size_t l = 1; l <= 8; ++l)
    check_weights(s_mean(analyze(Matrix::identity(l + 1))), uniform(l), 1e-15);
  check_weights(s_mean(analyze(kS1)), {0.5, 0.5});
  // I = {1} only
  check_weights(s_mean(analyze(Matrix{{1, -1}, {1, 1}})), {0.5, 0.5});
}

TEST_CASE("s_tail1: canonical parametrization") {
  const std::size_t n = 6;
  for (std::size_t l = 1; l <= n; ++l) {
    const auto pm = analyze(Matrix::identity(l + 1));
    // J1(l, n) = {l}
    check_weights(s_tail1(pm, n), indicator(l, l), 0);
    if (l < n) check_weights(s_tail1(pm, n - 1), indicator(l, l), 0);
  }
  // J1(n, n-1) = {n-1, n}
  auto want = std::vector<double>(n + 1, 0.0);
  want[n - 1] = want[n] = 0.5;
  check_weights(s_tail1(analyze(Matrix::identity(n + 1)), n - 1), want, 0);
}

TEST_CASE("s_tail1: a full tail sums every conservative row to 1, so all rows tie") {
  check_weights(s_tail1(analyze(kS1), 0), {0.5, 0.5});
}

TEST_CASE("s_tail2 examples") {
  const std::size_t n = 5;
  for (std::size_t l = 1; l <= n; ++l)
    check_weights(s_tail2(analyze(Matrix::identity(l + 1)), n), indicator(l, l), 0);
  // Normalized rows (2,-1) and (-1,2); tail maxima from i = 1 are -1 and 2.
  check_weights(s_tail2(analyze(kS1Inv), 1), {-1, 2});
  check_weights(s_tail2(analyze(Matrix{{1, -1}, {1, 1}}), 0), {0.5, 0.5});
}

TEST_CASE("s_maxcor examples") {
  check_weights(s_maxcor(analyze(Matrix::identity(5))), uniform(4), 1e-15);
  // Scores 1 and 1/sqrt(10).
  check_weights(s_maxcor(analyze(Matrix{{1, 1}, {1, -2}})), {0.5, 0.5});
  check_weights(s_maxcor(analyze(Matrix{{1, -1}, {3, 1}})), {0.75, 0.25});
}

TEST_CASE("s_near_uniform examples") {
  for (Norm q1 : kAllNorms) check_weights(s_near_uniform(analyze(Matrix::identity(4)), q1), uniform(3), 1e-15);
  check_weights(s_near_uniform(analyze(kS1), Norm::L1), {0.5, 0.5});
  // Row 0 normalizes to the uniform row itself.
  check_weights(s_near_uniform(analyze(Matrix{{1, 1}, {1, 0}}), Norm::L2), {0.5, 0.5});
}

TEST_CASE("s_var: canonical rows all have zero variance, ordered by index") {
  const std::vector<double> s{3, 1, 4, 1, 5};
  const auto pm = analyze(Matrix::identity(5));
  check_weights(s_var(pm, s, 0), indicator(4, 0), 0);
  check_weights(s_var(pm, s, 3), indicator(4, 3), 0);
  check_weights(s_var(pm, s, 40), indicator(4, 4), 0);
}

TEST_CASE("s_var: u = 0 is the smallest variance, u = n the largest") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t l = 2 + trial % 6;
    const auto pm = analyze(oracle::random_matrix(rng, l + 1));
    const auto s = oracle::random_vector(rng, l + 1, -3, 3);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t j : pm.index_set) {
      const double v = weighted_stats(conservative_row(pm, j), s).variance;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(weighted_stats(s_var(pm, s, 0), s).variance == doctest::Approx(lo).epsilon(1e-12));
    CHECK(weighted_stats(s_var(pm, s, l), s).variance == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("s_var: single-row index set") {
  const auto pm = analyze(Matrix{{1, -1}, {1, 1}});
  for (std::size_t u = 0; u < 4; ++u)
    check_weights(s_var(pm, std::vector<double>{2, 7}, u), {0.5, 0.5});
}

TEST_CASE("s_fd examples") {
  const auto canon = analyze(Matrix::identity(2));
  check_weights(s_fd(canon, std::vector<double>{5, 9}, 0, 0), {1, 0}, 0);

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t l = 2 + trial % 6;
    const auto pm = analyze(oracle::random_matrix(rng, l + 1));
    const auto s = oracle::random_vector(rng, l + 1, -3, 3);
    double nearest0 = INFINITY, farthest_l = -INFINITY;
    for (std::size_t j : pm.index_set) {
      const double m = conservative_row(pm, j).apply(s);
      nearest0 = std::min(nearest0, std::abs(m - s[0]));
      farthest_l = std::max(farthest_l, std::abs(m - s[l]));
    }
    CHECK(std::abs(s_fd(pm, s, 0, 0).apply(s) - s[0]) == doctest::Approx(nearest0));
    CHECK(std::abs(s_fd(pm, s, l, l).apply(s) - s[l]) == doctest::Approx(farthest_l));
  }
  CHECK_THROWS_AS(s_fd(canon, std::vector<double>{1, 2, 3}, 0, 0), DimensionError);
}

TEST_CASE("every criterion output is conservative") {
  std::mt19937_64 rng(41);
  const EnergyCache cache(7);
  for (FamilyId fid : kAllFamilies) {
    for (std::size_t l = 1; l <= 7; ++l) {
      auto [theta, basis] = cache.theta_and_basis(fid, l);
      const auto pm = analyze(std::move(theta), std::move(basis));
      const auto s = oracle::random_vector(rng, l + 1, 10, 14);
      for (const auto& id : sample_criteria(7)) {
        const WeightRow w = apply_criterion(pm, id, s);
        CHECK(std::abs(w.sum() - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("clamping: hyperparameters beyond card(I) - 1 change nothing") {
  std::mt19937_64 rng(43);
  const auto pm = analyze(oracle::random_matrix(rng, 5));
  const auto s = oracle::random_vector(rng, 5);
  const std::size_t last = pm.index_set.size() - 1;
  for (std::size_t u = last; u < last + 5; ++u) {
    CHECK(s_u(pm, u).weights == s_u(pm, last).weights);
    CHECK(s_var(pm, s, u).weights == s_var(pm, s, last).weights);
    CHECK(s_fd(pm, s, 1, u).weights == s_fd(pm, s, 1, last).weights);
  }
  // anchor clamp: u >= l uses s(l)
  CHECK(s_fd(pm, s, 4, 2).weights == s_fd(pm, s, 50, 2).weights);
}

TEST_CASE("tie averaging: exactly equal scores average both rows") {
  // Rows are mirror images, so every symmetric score ties.
  const Matrix theta{{3, 1}, {1, 3}};
  const auto pm = analyze(theta);
  check_weights(s_maxcor(pm), {0.5, 0.5});
  for (Norm q1 : kAllNorms) check_weights(s_near_uniform(pm, q1), {0.5, 0.5});
  check_weights(s_tail1(pm, 0), {0.5, 0.5});
}

TEST_CASE("scale invariance: rescaling a row leaves every criterion unchanged") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t l = 3 + trial % 4;
    const Matrix theta = oracle::random_matrix(rng, l + 1);
    Matrix scaled = theta;
    for (std::size_t j = 0; j <= l; ++j) {
      const double c = (j % 2 ? -1.0 : 1.0) * scale(rng);
      for (double& x : scaled.row(j)) x *= c;
    }
    const auto a = analyze(theta);
    const auto b = analyze(scaled);
    REQUIRE(a.index_set == b.index_set);
    const auto s = oracle::random_vector(rng, l + 1);
    for (const auto& id : sample_criteria(l)) {
      const auto wa = apply_criterion(a, id, s);
      const auto wb = apply_criterion(b, id, s);
      for (std::size_t i = 0; i <= l; ++i) CHECK(std::abs(wa.weights[i] - wb.weights[i]) <= 1e-12);
    }
  }
}

TEST_CASE("criterion labels and kinds") {
  CHECK(CriterionId::tail2(86).label() == "S_tail2(u=86)");
  CHECK(CriterionId::fd(93, 5).label() == "S_fd(u=93,v=5)");
  CHECK(CriterionId::near_uniform(Norm::Inf).label() == "S_nearU(q1=inf)");
  CHECK(CriterionId::mean().label() == "S_mean");
  for (auto k : {CriterionKind::U, CriterionKind::MEAN, CriterionKind::TAIL1, CriterionKind::TAIL2,
                 CriterionKind::MAXCOR, CriterionKind::NEAR_U, CriterionKind::VAR, CriterionKind::FD})
    CHECK(parse_kind(kind_name(k)) == k);
}
