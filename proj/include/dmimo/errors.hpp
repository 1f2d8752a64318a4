#pragma once

#include <stdexcept>
#include <string>

namespace dmimo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
struct DimensionError : Error {
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
struct DomainError : Error {
  using Error::Error;
};

/// Matrix lacks full row rank. Carries smallest/largest singular value.
struct SingularityError : Error {
  SingularityError(const std::string& what, double ratio)
      : Error(what), singular_value_ratio(ratio) {}
  double singular_value_ratio;
};

/// Invalid scenario configuration; `key` names the offending setting.
struct ConfigError : Error {
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key(std::move(key)) {}
  std::string key;
};

/// Phase-2 capacity is zero, so forwarding never completes.
struct UnreachableError : Error {
  using Error::Error;
};

/// ZF precoding still rank deficient after the retry budget was spent.
struct DegenerateTrialError : Error {
  using Error::Error;
};

}  // namespace dmimo
