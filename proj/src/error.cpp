#include "lconf/error.hpp"

namespace lconf {

const char* toString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidPosition: return "invalid-position";
    case ErrorKind::SortMismatch: return "sort-mismatch";
    case ErrorKind::ArityMismatch: return "arity-conflict";
    case ErrorKind::NotGround: return "non-ground-input";
    case ErrorKind::NotTheoryTerm: return "non-theory-symbol-present";
    case ErrorKind::NotTheorySymbol: return "not-a-theory-symbol";
    case ErrorKind::MalformedLiteral: return "malformed-literal";
    case ErrorKind::Syntax: return "syntax-error";
    case ErrorKind::SortConflict: return "sort-conflict";
    case ErrorKind::UnsupportedSymbol: return "unsupported-symbol";
    case ErrorKind::MalformedConstraint: return "malformed-constraint";
    case ErrorKind::SolverFailure: return "solver-process-failure";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::InvalidArgument: return "invalid-argument";
  }
  return "error";
}

}  // namespace lconf
