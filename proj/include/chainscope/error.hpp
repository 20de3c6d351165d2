#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainscope {

/// Point outside the space, dimension mismatch, malformed map or odometer.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured cap (map count, product nodes, search frontier) was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A theorem hypothesis does not hold for the input (e.g. disconnected grid).
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An epsilon scan was asked to start from a system that is not chain transitive.
class NotTransitive : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// Cross-level consistency of an epsilon scan failed (divisibility or nesting).
class DiscretizationBreakdown : public std::runtime_error {
 public:
  DiscretizationBreakdown(std::size_t level, const std::string& what)
      : std::runtime_error("discretization breakdown at level " + std::to_string(level) + ": " + what),
        level_(level) {}

  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

}  // namespace chainscope
