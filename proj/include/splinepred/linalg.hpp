#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace splinepred {

/// Dense row-major matrix of doubles. Sizes in scope are a few hundred at
/// most, so no blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;

  Matrix transpose() const;

  /// Largest absolute entry.
  double max_abs() const;
  /// Induced infinity norm (max absolute row sum).
  double norm_inf() const;

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Max |a_ij - b_ij|; sizes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);

/// x^T A x
double quadratic_form(const Matrix& a, std::span<const double> x);

struct InverseResult {
  Matrix inverse;
  /// ||A||_inf * ||A^{-1}||_inf
  double condition_estimate = 0.0;
};

/// Inverse via LU with partial pivoting. A pivot smaller than
/// 1e-13 * max|a_ij| raises SingularMatrixError carrying `level`.
InverseResult invert_with_condition(const Matrix& a, std::size_t level = 0);

Matrix invert(const Matrix& a, std::size_t level = 0);

/// Unpivoted Cholesky; returns false if a non-positive pivot appears.
bool cholesky_succeeds(const Matrix& a);

}  // namespace splinepred
