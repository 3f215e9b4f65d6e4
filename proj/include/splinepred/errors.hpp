#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splinepred {

/// Coarse classification used by the CLI to map failures onto exit codes.
enum class ErrorCategory { Config, Ingestion, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Vector/matrix sizes do not fit together.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

/// Evaluation point outside the spline's support.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t level)
      : Error(ErrorCategory::Numerical, what), level_(level) {}

  /// Level l of the offending matrix, 0 when not tied to a level.
  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

/// Row j is not correlated with the constant trend (j is outside I(l)).
class NotCorrelatedError : public Error {
 public:
  explicit NotCorrelatedError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

class LagError : public Error {
 public:
  explicit LagError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::Config, what) {}
};

/// Malformed or insufficient input data. `line` is 1-based, 0 if unknown.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::size_t line = 0)
      : Error(ErrorCategory::Ingestion, what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace splinepred
