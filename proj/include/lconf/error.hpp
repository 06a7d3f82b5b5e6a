#pragma once

#include <stdexcept>
#include <string>

namespace lconf {

enum class ErrorKind {
  InvalidPosition,
  SortMismatch,
  ArityMismatch,
  NotGround,
  NotTheoryTerm,
  NotTheorySymbol,
  MalformedLiteral,
  Syntax,
  SortConflict,
  UnsupportedSymbol,
  MalformedConstraint,
  SolverFailure,
  Io,
  InvalidArgument,
};

const char* toString(ErrorKind kind);

/// Exception type for every failure raised by the library. The C API maps
/// `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lconf
