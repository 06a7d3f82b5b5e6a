#pragma once

#include "lconf/frontend.hpp"
#include "lconf/rewrite.hpp"
#include "lconf/rule.hpp"
#include "lconf/smt.hpp"

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lconf {

/// ⟨ρ1, p, ρ2⟩ with renamed-apart rules and their mgu.
struct Overlap {
  Rule rule1;
  Rule rule2;
  Position position;
  Substitution mgu;
  /// The solver could not decide satisfiability of φ1σ ∧ φ2σ.
  bool satisfiabilityUnknown = false;
};

struct CriticalPair {
  ConstrainedEquation equation;
  /// ⋀ x = x over the extra variables of both rules.
  Term dummyPsi;
  bool overlay = false;
  std::string origin;
  /// False when the solver could not confirm the constraint satisfiable.
  bool satisfiable = true;
};

/// User rules followed by the calculation rules of every theory symbol that
/// occurs in a left-hand side.
std::vector<Rule> overlapRules(const Lctrs& sys);

std::vector<Overlap> computeOverlaps(const Lctrs& sys, Solver& solver, const NameSupply& names);
/// One pair per overlap; with `withPsi` false the extra-variable equations
/// are left out (debugging aid).
CriticalPair criticalPair(const Overlap& o, bool withPsi = true);
std::vector<CriticalPair> criticalPairs(const Lctrs& sys, Solver& solver, const NameSupply& names,
                                        bool withPsi = true);

/// T(s, t, φ).
Term trivialityFormula(const Term& s, const Term& t, const Term& phi);
/// φ ⇒ T(s, t, φ) is valid. Unknown counts as not trivial.
bool isTrivial(const ConstrainedEquation& eq, Solver& solver, bool knownSatisfiable = false);

/// Variables renamed by first occurrence and constraint conjuncts sorted,
/// so that equations equal up to renaming share a key.
std::string equationKey(const ConstrainedEquation& eq);

enum class Method { Orthogonal, WeaklyOrthogonal, StronglyClosed, ParallelClosed, AlmostParallelClosed, Joinable };

const char* methodName(Method m);
/// Short selector used on the command line: o, wo, sc, pc, apc, j.
const char* methodKey(Method m);
std::optional<Method> methodFromKey(std::string_view key);

struct ProofStep {
  int side = 1;
  bool parallel = false;
  std::vector<StepRecord> redexes;
  ConstrainedEquation before;
  ConstrainedEquation after;

  std::string toString() const;
};

struct Closing {
  std::string clause;
  std::vector<ProofStep> steps;
  ConstrainedEquation final;

  std::string toString() const;
};

struct CpProof {
  std::size_t cp = 0;
  std::vector<Closing> closings;
};

struct CheckConfig {
  std::size_t stepBound = 5;
  std::size_t joinBound = 100;
  std::size_t nodeBudget = 5000;
  RewriteConfig rewrite;
};

struct CriterionResult {
  Method method = Method::Orthogonal;
  bool success = false;
  std::vector<CpProof> proof;
  std::vector<std::string> reasons;
};

/// Shared inputs of the criterion checkers.
struct CheckContext {
  const Lctrs& sys;
  const std::vector<CriticalPair>& cps;
  Solver& solver;
  NameSupply names;
  CheckConfig config;
};

CriterionResult checkOrthogonal(const CheckContext& ctx);
CriterionResult checkWeaklyOrthogonal(const CheckContext& ctx);
CriterionResult checkStronglyClosed(const CheckContext& ctx);
CriterionResult checkParallelClosed(const CheckContext& ctx);
CriterionResult checkAlmostParallelClosed(const CheckContext& ctx);
CriterionResult checkJoinableAll(const CheckContext& ctx);
CriterionResult runCriterion(Method m, const CheckContext& ctx);

enum class Outcome { Yes, Maybe, Timeout };
const char* toString(Outcome o);

struct AnalysisConfig {
  SolverConfig solver;
  std::chrono::milliseconds timeout{5000};
  CheckConfig check;
  std::vector<Method> criteria{Method::Orthogonal, Method::WeaklyOrthogonal, Method::StronglyClosed,
                               Method::ParallelClosed, Method::AlmostParallelClosed};
  bool assumeTerminating = false;
  bool sequential = false;
  bool withPsi = true;
};

struct Verdict {
  Outcome outcome = Outcome::Maybe;
  std::optional<Method> method;
  std::vector<CriticalPair> cps;
  std::vector<CpProof> proof;
  std::vector<std::string> reasons;
  double elapsedMs = 0;
};

/// Runs the enabled criteria (concurrently unless `sequential`) and returns
/// the first YES. Throws Error(SolverFailure) when the solver cannot run.
Verdict analyze(const Lctrs& sys, const AnalysisConfig& config);

std::string formatText(const Verdict& v);
std::string formatKv(const Verdict& v);

/// Re-executes every recorded step through the rewriter and re-checks the
/// final triviality. Returns the problems found (empty when the proof holds).
std::vector<std::string> replayProof(const Lctrs& sys, const std::vector<CriticalPair>& cps,
                                     const std::vector<CpProof>& proof, Solver& solver);

}  // namespace lconf
