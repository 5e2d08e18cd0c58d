#pragma once

#include <stdexcept>
#include <string>

namespace mcse {

// Raised when a variance estimate is negative and no interval can be formed.
// Callers in the stopping loop treat this as "keep sampling".
class IndefiniteVarianceError : public std::runtime_error {
 public:
  explicit IndefiniteVarianceError(const std::string& what) : std::runtime_error(what) {}
};

// The sequential procedure hit its iteration cap before the stopping rule held.
class BudgetExceededError : public std::runtime_error {
 public:
  explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent configuration, e.g. an audit asked under the wrong moment regime.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace mcse
