#pragma once

#include <stdexcept>
#include <string>

namespace expostat {

/// Division of a Rational (or RationalFunction) by zero.
class DivisionByZeroError : public std::domain_error {
 public:
  explicit DivisionByZeroError(const std::string& what) : std::domain_error(what) {}
};

/// Evaluation of a rational function at a root of its denominator.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

/// Out-of-domain argument: k > n, k = 0, s <= 0, r = 0, and so on.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A statistical test was asked to work on a sample with no spread.
class DegenerateSampleError : public std::runtime_error {
 public:
  explicit DegenerateSampleError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed command line.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace expostat
