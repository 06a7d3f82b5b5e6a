#pragma once

#include "lconf/rule.hpp"
#include "lconf/smt.hpp"
#include "lconf/term.hpp"
#include "lconf/theory.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lconf {

struct SourceLoc {
  int line = 0;
  int column = 0;

  std::string toString() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Untyped term as written in the input file.
struct RawTerm {
  enum class Kind { Name, Literal, Call, Op };

  Kind kind = Kind::Name;
  std::string text;  // identifier, literal text, or operator spelling
  std::vector<RawTerm> args;
  SourceLoc loc;
};

struct RawDecl {
  std::string name;
  std::vector<std::string> argSorts;
  std::string resultSort;
  SourceLoc loc;
};

struct RawRule {
  RawTerm lhs;
  RawTerm rhs;
  std::optional<RawTerm> constraint;
  SourceLoc loc;
};

struct RawSystem {
  std::optional<std::string> theory;
  std::optional<std::string> logic;
  std::optional<std::string> solver;
  std::optional<std::string> defaultSort;
  std::vector<RawDecl> decls;
  std::vector<RawRule> rules;
};

struct Signature {
  std::map<std::string, SymbolRef> symbols;  // term symbols, declared or inferred
  std::vector<Sort> sorts;

  const Symbol* find(const std::string& name) const;
};

/// A well-sorted LCTRS ready for analysis.
struct Lctrs {
  Signature signature;
  Theory theory;
  std::vector<Rule> rules;
  std::optional<std::string> solver;
  Sort defaultSort = Sort::Int();
};

/// Throws Error(Syntax) with line/column.
RawSystem parse(std::string_view text);
/// Throws Error(SortConflict) naming both use sites, or Error(ArityMismatch).
Lctrs inferSorts(const RawSystem& raw);
/// parse + inferSorts.
Lctrs loadSystem(std::string_view text);
/// Reads a file; throws Error(Io) when it cannot be opened.
Lctrs loadSystemFile(const std::string& path);

struct Diagnostic {
  enum class Severity { Error, Warning };

  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  int rule = -1;  // 0-based rule index, -1 for system-level findings

  std::string toString() const;
};

/// Checks the well-formedness invariants of `sys`. With a solver, rules
/// whose constraint is unsatisfiable are reported as warnings.
std::vector<Diagnostic> validate(const Lctrs& sys, Solver* solver = nullptr);
bool hasErrors(const std::vector<Diagnostic>& diags);

/// Renders `sys` in the input format; re-parsing yields a variant-equal
/// system.
std::string print(const Lctrs& sys);

/// Parses terms against the signature of `sys`, inferring variable sorts
/// jointly across all texts. `varSorts` pins sorts explicitly; remaining
/// ambiguity falls back to the system's default sort.
std::vector<Term> parseTerms(const Lctrs& sys, const std::vector<std::string>& texts,
                             const std::map<std::string, Sort>& varSorts = {});
Term parseTerm(const Lctrs& sys, std::string_view text, const std::map<std::string, Sort>& varSorts = {});

}  // namespace lconf
