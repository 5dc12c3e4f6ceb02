#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deltaclose {

enum class ErrorKind {
  NotSquareFree,
  NoSignChange,
  FieldMismatch,
  ZeroDivisor,
  DimensionMismatch,
  EmptyGeneratorList,
  ShiftNotOnGrid,
  PreconditionNotInvariant,
  EmptyInput,
  DenseGroup,
  NonIntegralRatio,
  NonpositivePeriod,
  LatticeValuesNonzero,
  FrameInvalid,
  NotDense,
  Inconsistent,
  IllConditionedFit,
  Malformed,
  Internal,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so the
// CLI can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Index of the offending operator for PreconditionNotInvariant failures.
class NotInvariantError : public Error {
 public:
  NotInvariantError(std::size_t index, const std::string& what)
      : Error(ErrorKind::PreconditionNotInvariant, what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace deltaclose
