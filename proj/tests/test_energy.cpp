#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "splinepred/energy.hpp"
#include "splinepred/errors.hpp"
#include "splinepred/spline.hpp"

using namespace splinepred;

TEST_CASE("assemble_energy: level 1") {
  const auto e = assemble_energy(1);
  const Matrix s_expected{{1.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 3}};
  const Matrix m_expected{{1.0 / 3, 2.0 / 3}, {-1.0 / 3, 1.0 / 3}};
  CHECK(max_abs_diff(e.s, s_expected) <= 1e-12);
  CHECK(max_abs_diff(e.m, m_expected) <= 1e-12);
}

TEST_CASE("assemble_energy: level 2 quadratic form on (1,0,1)") {
  const auto e = assemble_energy(2);
  const std::vector<double> s{1, 0, 1};
  CHECK(quadratic_form(e.s, s) == doctest::Approx(33.0 / 70.0).epsilon(1e-13));
  CHECK(quadratic_form(e.m, s) == doctest::Approx(33.0 / 70.0).epsilon(1e-13));
}

TEST_CASE("assemble_energy: zero vector and invalid level") {
  const auto e = assemble_energy(5);
  const std::vector<double> zero(6, 0.0);
  CHECK(quadratic_form(e.m, zero) == 0.0);
  CHECK_THROWS_AS(assemble_energy(0), DimensionError);
}

TEST_CASE("Gram oracle: s^T S s equals the spline's squared L2 norm") {
  std::mt19937_64 rng(99);
  for (std::size_t l = 1; l <= 12; ++l) {
    const auto e = assemble_energy(l);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = oracle::random_vector(rng, l + 1, -3, 3);
      const double qs = quadratic_form(e.s, s);
      const double qm = quadratic_form(e.m, s);
      const double direct = integral_of_square(interpolate_natural(s));
      CHECK(std::abs(qs - direct) <= 1e-9 * (1 + std::abs(qs)));
      CHECK(std::abs(qm - qs) <= 1e-10 * std::abs(qs));
    }
    CHECK(max_abs_diff(e.s, e.s.transpose()) <= 1e-12);
    Matrix sym(l + 1, l + 1);
    for (std::size_t r = 0; r <= l; ++r)
      for (std::size_t c = 0; c <= l; ++c) sym(r, c) = 0.5 * (e.m(r, c) + e.m(c, r));
    CHECK(max_abs_diff(e.s, sym) <= 1e-12);
  }
}

TEST_CASE("S is positive definite up to level 20") {
  for (std::size_t l = 1; l <= 20; ++l) CHECK(cholesky_succeeds(assemble_energy(l).s));
}

TEST_CASE("M is not symmetric beyond level 0") {
  for (std::size_t l = 1; l <= 6; ++l) {
    const auto e = assemble_energy(l);
    CHECK(max_abs_diff(e.m, e.m.transpose()) > 1e-3);
  }
}

TEST_CASE("build_family: level-1 members") {
  const Matrix s1{{1.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 3}};
  CHECK(max_abs_diff(build_family(FamilyId::S, 1).at_level(1), s1) <= 1e-12);
  CHECK(max_abs_diff(build_family(FamilyId::S_INV, 1).at_level(1), Matrix{{4, -2}, {-2, 4}}) <=
        1e-12);
  const Matrix m1{{1.0 / 3, 2.0 / 3}, {-1.0 / 3, 1.0 / 3}};
  CHECK(max_abs_diff(build_family(FamilyId::M_T, 1).at_level(1), m1.transpose()) <= 1e-12);
}

TEST_CASE("build_family: shapes and inverse round trip up to level 20") {
  const EnergyCache cache(20);
  for (FamilyId id : kAllFamilies) {
    const ParamFamily f = build_family(id, cache);
    REQUIRE(f.max_level() == 20);
    for (std::size_t l = 1; l <= 20; ++l) {
      const Matrix& a = f.at_level(l);
      CHECK(a.rows() == l + 1);
      CHECK(a.cols() == l + 1);
      CHECK(max_abs_diff(a * f.basis_at_level(l), Matrix::identity(l + 1)) <= 1e-8);
      const Matrix back = invert(invert(a));
      CHECK(max_abs_diff(back, a) <= 1e-7 * a.max_abs());
    }
  }
}

TEST_CASE("family tags round trip") {
  for (FamilyId id : kAllFamilies) CHECK(parse_family_tag(family_tag(id)) == id);
  CHECK_FALSE(parse_family_tag("X").has_value());
}
