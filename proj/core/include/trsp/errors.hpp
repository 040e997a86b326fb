#pragma once

#include <stdexcept>
#include <string>

namespace trsp {

/// Raised when the exact solver's state enumeration would exceed its node
/// budget. The message points the caller at the approximate solver.
class NodeBudgetError : public std::runtime_error {
 public:
  explicit NodeBudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the relaxation-rounding LP would exceed its size guard.
class LpSizeError : public std::runtime_error {
 public:
  explicit LpSizeError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on scenario or plan configuration problems; the message carries
/// the offending file/key location.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trsp
