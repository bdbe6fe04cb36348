#pragma once

#include <stdexcept>
#include <string>

namespace charshrink {

/// Thrown when a matrix that must be positive definite is not
/// (smallest eigenvalue <= 1e-12).
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  explicit NotPositiveDefiniteError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Thrown when solver iterates become non-finite.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Thrown by portfolio_weights when the weight normalizer is zero.
class DegeneratePortfolioError : public std::runtime_error {
 public:
  explicit DegeneratePortfolioError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Thrown by tpr_tnr when a rate has an empty denominator.
class UndefinedRateError : public std::runtime_error {
 public:
  explicit UndefinedRateError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace charshrink
