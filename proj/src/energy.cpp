#include "splinepred/energy.hpp"

#include <cstdio>
#include <string>

#include "splinepred/errors.hpp"
#include "splinepred/parallel.hpp"
#include "splinepred/spline.hpp"

namespace splinepred {

namespace {

// Rows 0..l-1 of the linear maps knot values -> (p, q, u, v) at interval starts.
struct DerivativeMaps {
  Matrix p, q, u, v;
};

DerivativeMaps derivative_maps(std::size_t l) {
  DerivativeMaps d{Matrix(l, l + 1), Matrix(l, l + 1), Matrix(l, l + 1), Matrix(l, l + 1)};
  std::vector<double> e(l + 1, 0.0);
  for (std::size_t k = 0; k <= l; ++k) {
    e[k] = 1.0;
    const PiecewiseCubic c = interpolate_natural(e);
    for (std::size_t i = 0; i < l; ++i) {
      d.p(i, k) = c.p[i];
      d.q(i, k) = c.q[i];
      d.u(i, k) = c.u[i];
      d.v(i, k) = c.v[i];
    }
    e[k] = 0.0;
  }
  return d;
}

// out += w * a^T b for row vectors a, b.
void add_outer(Matrix& out, double w, std::span<const double> a, std::span<const double> b) {
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double ar = w * a[r];
    if (ar == 0.0) continue;
    auto row = out.row(r);
    for (std::size_t c = 0; c < b.size(); ++c) row[c] += ar * b[c];
  }
}

std::string condition_warning(FamilyId id, std::size_t l, double cond) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "family %s level %zu: condition estimate %.3e exceeds %.0e",
                std::string(family_tag(id)).c_str(), l, cond, kConditionWarning);
  return buf;
}

}  // namespace

EnergyMatrixPair assemble_energy(std::size_t l) {
  if (l < 1) throw DimensionError("assemble_energy: level must be >= 1");

  const DerivativeMaps d = derivative_maps(l);
  const std::array<const Matrix*, 4> blocks{&d.p, &d.q, &d.u, &d.v};
  // s(i + t) = sum_a coeff[a] * block_a * t^a
  constexpr std::array<double, 4> coeff{1.0, 1.0, 0.5, 1.0 / 6.0};

  Matrix m(l + 1, l + 1);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = a; b < 4; ++b) {
        const double moment = 1.0 / static_cast<double>(a + b + 1);
        const double w = (a == b ? 1.0 : 2.0) * coeff[a] * coeff[b] * moment;
        add_outer(m, w, blocks[a]->row(i), blocks[b]->row(i));
      }
    }
  }

  Matrix s(l + 1, l + 1);
  for (std::size_t r = 0; r <= l; ++r)
    for (std::size_t c = 0; c <= l; ++c) s(r, c) = 0.5 * (m(r, c) + m(c, r));

  return {l, std::move(m), std::move(s)};
}

std::string_view family_tag(FamilyId id) {
  switch (id) {
    case FamilyId::M: return "M";
    case FamilyId::M_T: return "Mt";
    case FamilyId::M_INV: return "Minv";
    case FamilyId::M_INV_T: return "Minvt";
    case FamilyId::S: return "S";
    case FamilyId::S_INV: return "Sinv";
  }
  return "?";
}

std::optional<FamilyId> parse_family_tag(std::string_view tag) {
  for (FamilyId id : kAllFamilies)
    if (family_tag(id) == tag) return id;
  return std::nullopt;
}

EnergyCache::EnergyCache(std::size_t n) {
  if (n < 1) throw DimensionError("EnergyCache: n must be >= 1");
  levels_.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const std::size_t l = k + 1;
    Level& lv = levels_[k];
    lv.pair = assemble_energy(l);
    InverseResult mi = invert_with_condition(lv.pair.m, l);
    InverseResult si = invert_with_condition(lv.pair.s, l);
    if (mi.condition_estimate > kConditionWarning)
      lv.warnings.push_back(condition_warning(FamilyId::M, l, mi.condition_estimate));
    if (si.condition_estimate > kConditionWarning)
      lv.warnings.push_back(condition_warning(FamilyId::S, l, si.condition_estimate));
    lv.m_inv = std::move(mi.inverse);
    lv.s_inv = std::move(si.inverse);
  });
  for (const Level& lv : levels_)
    warnings_.insert(warnings_.end(), lv.warnings.begin(), lv.warnings.end());
}

std::pair<Matrix, Matrix> EnergyCache::theta_and_basis(FamilyId id, std::size_t l) const {
  const Level& lv = levels_.at(l - 1);
  switch (id) {
    case FamilyId::M: return {lv.pair.m, lv.m_inv};
    case FamilyId::M_T: return {lv.pair.m.transpose(), lv.m_inv.transpose()};
    case FamilyId::M_INV: return {lv.m_inv, lv.pair.m};
    case FamilyId::M_INV_T: return {lv.m_inv.transpose(), lv.pair.m.transpose()};
    case FamilyId::S: return {lv.pair.s, lv.s_inv};
    case FamilyId::S_INV: return {lv.s_inv, lv.pair.s};
  }
  throw ConfigError("unknown family");
}

ParamFamily build_family(FamilyId id, const EnergyCache& cache) {
  ParamFamily f;
  f.id = id;
  const std::size_t n = cache.max_level();
  f.theta.reserve(n);
  f.basis.reserve(n);
  for (std::size_t l = 1; l <= n; ++l) {
    auto [theta, basis] = cache.theta_and_basis(id, l);
    f.theta.push_back(std::move(theta));
    f.basis.push_back(std::move(basis));
  }
  f.warnings = cache.warnings();
  return f;
}

ParamFamily build_family(FamilyId id, std::size_t n) {
  return build_family(id, EnergyCache(n));
}

}  // namespace splinepred
