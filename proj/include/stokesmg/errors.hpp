#pragma once

#include <stdexcept>
#include <string>

namespace stokesmg {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, unbuilt level, non-nested levels).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stokesmg
