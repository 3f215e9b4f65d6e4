#include "splinepred/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "splinepred/errors.hpp"

namespace splinepred {

PiecewiseCubic interpolate_natural(std::span<const double> values) {
  if (values.size() < 2)
    throw DimensionError("natural spline needs at least 2 knots, got " +
                         std::to_string(values.size()));
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("natural spline: non-finite knot value");

  const std::size_t l = values.size() - 1;
  PiecewiseCubic s;
  s.p.assign(values.begin(), values.end());
  s.q.assign(l + 1, 0.0);
  s.u.assign(l + 1, 0.0);
  s.v.assign(l, 0.0);

  // Interior unknowns u_1..u_{l-1}; diagonal 4, off-diagonals 1.
  const std::size_t m = l - 1;
  if (m > 0) {
    std::vector<double> diag(m, 4.0);
    std::vector<double> rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      rhs[k] = 6.0 * (s.p[i - 1] - 2.0 * s.p[i] + s.p[i + 1]);
    }
    for (std::size_t k = 1; k < m; ++k) {
      const double w = 1.0 / diag[k - 1];
      diag[k] -= w;
      rhs[k] -= w * rhs[k - 1];
    }
    s.u[m] = rhs[m - 1] / diag[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) s.u[k + 1] = (rhs[k] - s.u[k + 2]) / diag[k];
  }

  for (std::size_t i = 0; i < l; ++i) {
    s.v[i] = s.u[i + 1] - s.u[i];
    s.q[i] = s.p[i + 1] - s.p[i] - s.u[i] / 2.0 - s.v[i] / 6.0;
  }
  s.q[l] = s.q[l - 1] + s.u[l - 1] + s.v[l - 1] / 2.0;
  return s;
}

double evaluate(const PiecewiseCubic& spline, double t) {
  const std::size_t l = spline.level();
  if (l == 0) throw DimensionError("evaluate: empty spline");
  if (!(t >= 0.0 && t <= static_cast<double>(l)))
    throw DomainError("evaluate: t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(l) + "]");
  const std::size_t i = std::min(static_cast<std::size_t>(std::floor(t)), l - 1);
  const double x = t - static_cast<double>(i);
  return spline.p[i] + x * (spline.q[i] + x * (spline.u[i] / 2.0 + x * spline.v[i] / 6.0));
}

double integral_of_square(const PiecewiseCubic& spline) {
  const std::size_t l = spline.level();
  if (l == 0) throw DimensionError("integral_of_square: empty spline");

  // Gauss-Legendre nodes/weights mapped to [0, 1].
  const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
  const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
  const std::array<double, 4> nodes{(1 - b) / 2, (1 - a) / 2, (1 + a) / 2, (1 + b) / 2};
  const std::array<double, 4> weights{wb / 2, wa / 2, wa / 2, wb / 2};

  double total = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    double piece = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double x = nodes[k];
      const double y =
          spline.p[i] + x * (spline.q[i] + x * (spline.u[i] / 2.0 + x * spline.v[i] / 6.0));
      piece += weights[k] * y * y;
    }
    total += piece;
  }
  return total;
}

double continuity_residual(const PiecewiseCubic& spline) {
  double r = 0.0;
  for (std::size_t i = 0; i < spline.v.size(); ++i) {
    const auto& s = spline;
    r = std::max(r, std::abs(s.p[i] + s.q[i] + s.u[i] / 2 + s.v[i] / 6 - s.p[i + 1]));
    r = std::max(r, std::abs(s.q[i] + s.u[i] + s.v[i] / 2 - s.q[i + 1]));
    r = std::max(r, std::abs(s.v[i] - (s.u[i + 1] - s.u[i])));
  }
  return r;
}

}  // namespace splinepred
