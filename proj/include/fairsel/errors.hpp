#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairsel {

/// Base of every error the library throws. `kind()` is a stable machine name
/// used in the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  std::string_view kind() const noexcept { return kind_; }

 private:
  std::string_view kind_;
};

/// Malformed graph or path (cycle, dangling edge, non-adjacent path step).
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& m) : Error("structural", m) {}
};

/// Caller violated a precondition.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& m) : Error("contract", m) {}
};

/// Unknown variable or column name.
class LookupError : public Error {
 public:
  explicit LookupError(const std::string& m) : Error("lookup", m) {}
};

/// Zero-variance column or otherwise singular statistic.
class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& m) : Error("degeneracy", m) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& m) : Error("insufficient_data", m) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& m) : Error("training", m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("io", m) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& m) : Error("argument", m) {}
};

}  // namespace fairsel
