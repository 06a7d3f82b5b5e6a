#pragma once

#include "lconf/term.hpp"

#include <chrono>
#include <cstddef>
#include <stop_token>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lconf {

enum class SmtResult { Sat, Unsat, Unknown };
enum class Validity { Valid, NotValid, Unknown };

const char* toString(SmtResult r);
const char* toString(Validity v);

/// Thrown out of solver calls and searches once cancellation was requested.
struct Cancelled {};

struct SolverConfig {
  std::string executable = "z3";
  /// Extra command-line arguments; when empty they are derived from the
  /// executable name (z3 needs `-in`, cvc5 `--lang=smt2`).
  std::vector<std::string> arguments;
  std::string logic = "QF_LIA";
  std::chrono::milliseconds perQueryTimeout{2000};

  std::vector<std::string> effectiveArguments() const;
};

/// SMT-LIB 2 script declaring every free variable of `phi`, asserting it and
/// asking (check-sat). Byte-identical output for identical input. Throws
/// Error(MalformedConstraint) for non-logical terms or non-theory sorts.
std::string serialize(const Term& phi, std::string_view logic);
/// The s-expression for a single logical term.
std::string toSmtLib(const Term& t);
/// True when `t` multiplies two non-constant operands.
bool isNonlinear(const Term& t);

/// One-shot solver client: every query runs a fresh solver process over
/// stdin/stdout. Answers are memoized per script. Not thread-safe; each
/// concurrent task owns its own instance.
class Solver {
 public:
  struct Stats {
    std::size_t queries = 0;
    std::size_t processRuns = 0;
    std::size_t cacheHits = 0;
    std::size_t unknowns = 0;
  };

  explicit Solver(SolverConfig config, std::stop_token stop = {});

  /// Throws Error(SolverFailure) when the process cannot be run and
  /// Cancelled when the stop token fires.
  SmtResult checkSat(const Term& phi);
  /// ¬φ unsatisfiable ⇒ Valid.
  Validity isValid(const Term& phi);

  const SolverConfig& config() const { return config_; }
  const Stats& stats() const { return stats_; }
  std::stop_token stopToken() const { return stop_; }

 private:
  SmtResult run(const std::string& script);

  SolverConfig config_;
  std::stop_token stop_;
  std::unordered_map<std::string, SmtResult> cache_;
  Stats stats_;
};

}  // namespace lconf
