#pragma once

#include "lconf/frontend.hpp"
#include "lconf/rule.hpp"
#include "lconf/smt.hpp"
#include "lconf/term.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lconf {

struct ConstrainedTerm {
  Term term;
  Term constraint;

  std::string toString() const;
};

/// s ≈ t [φ], rewritten as the term ≈(s, t): positions below 1 address s,
/// positions below 2 address t.
struct ConstrainedEquation {
  Term left;
  Term right;
  Term constraint;

  Term asTerm() const;
  ConstrainedTerm asConstrainedTerm() const { return {asTerm(), constraint}; }
  static ConstrainedEquation fromTerm(const Term& eq, const Term& constraint);
  std::string toString() const;
};

/// The binary root symbol of equations over sort `s`.
SymbolRef approxSymbol(const Sort& s);
bool isEquationTerm(const Term& t);

/// One contraction s →_{p|ρ|σ} t. For calculation steps `rule` is the
/// calculation rule of the symbol and σ binds its output variable either
/// to the computed value or to a fresh variable.
struct StepRecord {
  Position position;
  RuleRef rule;
  Substitution substitution;
  Term result;
  Term constraint;
  /// Conjuncts this step added to the constraint (calculation bindings and
  /// definitions of fresh variables).
  std::vector<Term> added;

  bool isCalculation() const { return rule && rule->calculation; }
  std::string ruleName() const;
  std::string toString() const;
};

/// σ ⊨ ρ: dom(σ) ⊆ Var(ρ), σ maps LVar(ρ) to values and φσ is valid.
/// Non-ground instances of φ are never valid here.
bool respects(const Substitution& sigma, const Rule& rule);

/// The shared calculation rule of a theory symbol.
RuleRef calculationRule(const SymbolRef& f);

/// All one-step successors of an unconstrained term. Logical variables not
/// bound by matching are solved from definitional conjuncts or drawn from
/// the values occurring in `t`.
std::vector<StepRecord> rewriteOne(const Term& t, const std::vector<Rule>& rules);

/// Replaces every value in `t` by a fresh variable; the constraint binds
/// each such variable to its value.
std::pair<Term, Term> tfTerm(const Term& t, const NameSupply& names);
Rule tfRule(const Rule& rule, const NameSupply& names);
std::vector<Rule> tfRules(const std::vector<Rule>& rules, const NameSupply& names);
Lctrs tfSystem(const Lctrs& sys, const NameSupply& names);

/// Exact replay check for a single unconstrained contraction at the root:
/// `redex` = ℓτ, `contractum` = rτ and τ ⊨ ρ. Calculation rules are checked
/// by evaluation.
bool isLegalContraction(const Term& redex, const Rule& rule, const Substitution& tau, const Term& contractum);
/// s →_{p|ρ|τ} t as an unconstrained step.
bool isLegalStep(const Term& s, const Position& p, const Rule& rule, const Substitution& tau, const Term& t);

struct RewriteConfig {
  std::size_t evarCap = 8;
  std::size_t maxRedexes = 4;
  std::size_t parallelBudget = 256;
};

/// Rewriting on constrained terms with a fixed (usually tf-transformed)
/// rule set. Owns no solver; the caller's solver must outlive it.
class ConstrainedRewriter {
 public:
  ConstrainedRewriter(std::vector<Rule> rules, Solver& solver, NameSupply names, RewriteConfig config = {});

  /// Successors at the positions accepted by `filter` (all positions when
  /// empty). Unless `knownSatisfiable`, an unsatisfiable constraint yields
  /// no steps and a diagnostic.
  std::vector<StepRecord> crewriteOne(const ConstrainedTerm& ct,
                                      const std::function<bool(const Position&)>& filter = {},
                                      bool knownSatisfiable = false);
  /// Steps whose redex is exactly at `p`; the constraint is assumed
  /// satisfiable.
  std::vector<StepRecord> contractionsAt(const ConstrainedTerm& ct, const Position& p);

  /// Steps of an equation on side 1 or 2.
  std::vector<StepRecord> stepsOnSide(const ConstrainedEquation& eq, int side, bool knownSatisfiable = true);

  struct ParallelStep {
    ConstrainedEquation result;
    std::vector<StepRecord> redexes;  // positions relative to the equation
  };
  /// All parallel successors on one side, including the empty step.
  std::vector<ParallelStep> cparallelOne(const ConstrainedEquation& eq, int side);

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }
  const std::vector<Rule>& rules() const { return rules_; }
  Solver& solver() { return solver_; }
  const NameSupply& names() const { return names_; }

  /// φ ⇒ ψ, with syntactic and ground shortcuts before asking the solver.
  bool implies(const Term& phi, const Term& psi);

 private:
  void ruleSteps(const ConstrainedTerm& ct, const Position& p, const RuleRef& rule, std::vector<StepRecord>& out);
  void calcSteps(const ConstrainedTerm& ct, const Position& p, std::vector<StepRecord>& out);

  std::vector<RuleRef> rules_ptr_;
  std::vector<Rule> rules_;
  Solver& solver_;
  NameSupply names_;
  RewriteConfig config_;
  std::vector<std::string> diagnostics_;
};

/// φ ⇒ ψ: conjuncts of ψ already in φ, reflexive equations and ground
/// conjuncts are settled without the solver. Unknown counts as false.
bool impliesFormula(Solver& solver, const Term& phi, const Term& psi);

/// Values occurring in `t`, in order of first occurrence, without repeats.
std::vector<Term> valuesIn(const Term& t);

}  // namespace lconf
