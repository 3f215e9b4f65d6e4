#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace splinepred {

/// Observed series s(0..n); index 0 corresponds to calendar year `start_year`.
struct SeriesData {
  std::vector<double> values;
  int start_year = 0;

  /// n, the last index.
  std::size_t last_index() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  /// s(0..l)
  std::span<const double> prefix(std::size_t l) const {
    return std::span<const double>(values).first(l + 1);
  }
};

/// Natural cubic spline on unit-spaced knots 0..l, stored by knot values and
/// derivatives. On [i, i+1):
///   s(t) = p_i + q_i (t-i) + u_i (t-i)^2 / 2 + v_i (t-i)^3 / 6
struct PiecewiseCubic {
  std::vector<double> p;  // values, l+1
  std::vector<double> q;  // first derivatives, l+1
  std::vector<double> u;  // second derivatives, l+1; u_0 = u_l = 0
  std::vector<double> v;  // third derivatives per interval, l

  std::size_t level() const noexcept { return p.empty() ? 0 : p.size() - 1; }
};

/// Interpolates `values` at knots 0..l with s''(0) = s''(l) = 0.
/// Interior second derivatives solve u_{i-1} + 4 u_i + u_{i+1} = 6 (p_{i-1} - 2 p_i + p_{i+1})
/// with the Thomas algorithm.
PiecewiseCubic interpolate_natural(std::span<const double> values);

/// s(t) for t in [0, l]; t = l uses the last interval's polynomial.
double evaluate(const PiecewiseCubic& spline, double t);

/// Exact integral of s(t)^2 over [0, l] by 4-point Gauss-Legendre per interval.
double integral_of_square(const PiecewiseCubic& spline);

/// Largest residual of the C^2 continuity constraints over all intervals:
///   p_i + q_i + u_i/2 + v_i/6 = p_{i+1}
///   q_i + u_i + v_i/2 = q_{i+1}
///   v_i = u_{i+1} - u_i
double continuity_residual(const PiecewiseCubic& spline);

}  // namespace splinepred
