#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ehlab {

// Two families, matching the CLI exit codes: configuration problems (2) and
// numeric failures (3).

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the validity window of an approximation.
class DomainError : public ConfigError {
 public:
  explicit DomainError(const std::string& what) : ConfigError(what) {}
};

class InsufficientDataError : public ConfigError {
 public:
  explicit InsufficientDataError(const std::string& what) : ConfigError(what) {}
};

class SingularFitError : public NumericError {
 public:
  explicit SingularFitError(const std::string& what) : NumericError(what) {}
};

class HermiticityError : public NumericError {
 public:
  explicit HermiticityError(const std::string& what) : NumericError(what) {}
};

class EmptyRegionError : public ConfigError {
 public:
  explicit EmptyRegionError(const std::string& what) : ConfigError(what) {}
};

/// Raised when an operation needs a nondegenerate quasi-energy spectrum.
/// Carries the offending eigen-index pairs.
class DegenerateSpectrumError : public NumericError {
 public:
  DegenerateSpectrumError(const std::string& what, std::vector<std::pair<int, int>> pairs)
      : NumericError(what), pairs_(std::move(pairs)) {}

  const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }

 private:
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace ehlab
