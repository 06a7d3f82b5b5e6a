#include "lconf/rewrite.hpp"

#include "lconf/error.hpp"
#include "lconf/theory.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

namespace lconf {

std::string ConstrainedTerm::toString() const { return term.toString() + " [" + constraint.toString() + "]"; }

SymbolRef approxSymbol(const Sort& s) {
  static std::mutex mu;
  static std::map<std::string, SymbolRef> table;
  std::lock_guard lock(mu);
  auto& slot = table[s.name];
  if (!slot) slot = std::make_shared<const Symbol>(Symbol{"≈", {s, s}, Sort{"≈"}, SymbolKind::Term, {}, {}});
  return slot;
}

bool isEquationTerm(const Term& t) { return !t.isVariable() && t.symbol().name == "≈" && t.args().size() == 2; }

Term ConstrainedEquation::asTerm() const { return Term::app(approxSymbol(left.sort()), {left, right}); }

ConstrainedEquation ConstrainedEquation::fromTerm(const Term& eq, const Term& constraint) {
  if (!isEquationTerm(eq)) throw Error(ErrorKind::InvalidArgument, "not an equation: " + eq.toString());
  return {eq.arg(0), eq.arg(1), constraint};
}

std::string ConstrainedEquation::toString() const {
  return left.toString() + " ≈ " + right.toString() + " [" + constraint.toString() + "]";
}

std::string StepRecord::ruleName() const {
  if (!rule) return "?";
  if (rule->calculation) return rule->label;
  return "rule " + rule->label;
}

std::string StepRecord::toString() const {
  return position.toString() + " / " + ruleName() + " / " + substitution.toString();
}

namespace {

/// x = e or e = x with x ∉ Var(e).
std::optional<Term> definitionOf(const Variable& x, const Term& phi) {
  for (const Term& c : conjuncts(phi)) {
    if (c.isVariable() || c.symbol().op != TheoryOp::Eq) continue;
    for (int side = 0; side < 2; ++side) {
      const Term& lhs = c.arg(side);
      const Term& rhs = c.arg(1 - side);
      if (lhs.isVariable() && lhs.variable() == x && !occurs(x, rhs)) return rhs;
    }
  }
  return std::nullopt;
}

void collectValues(const Term& t, std::vector<Term>& out) {
  if (t.isVariable()) return;
  if (t.isValue()) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return;
  }
  for (const Term& a : t.args()) collectValues(a, out);
}

bool allValues(const Term& t) {
  return std::all_of(t.args().begin(), t.args().end(), [](const Term& a) { return a.isValue(); });
}

/// Variables of the rule not bound by matching its left-hand side, in a
/// deterministic order: constraint variables first, then the rest.
std::vector<Variable> unboundVars(const Rule& rule) {
  VarSet lhs = vars(rule.lhs);
  std::vector<Variable> out;
  for (const Variable& x : varsInOrder(rule.constraint)) {
    if (!lhs.count(x)) out.push_back(x);
  }
  for (const Variable& x : varsInOrder(rule.rhs)) {
    if (!lhs.count(x) && std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

template <typename F>
void forEachCombination(const std::vector<std::vector<Term>>& options, std::size_t cap, F&& f) {
  std::vector<std::size_t> idx(options.size(), 0);
  for (const auto& o : options) {
    if (o.empty()) return;
  }
  std::size_t produced = 0;
  for (;;) {
    if (produced++ >= cap) return;
    std::vector<Term> pick;
    pick.reserve(options.size());
    for (std::size_t i = 0; i < options.size(); ++i) pick.push_back(options[i][idx[i]]);
    f(pick);
    std::size_t k = 0;
    while (k < options.size()) {
      if (++idx[k] < options[k].size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == options.size()) return;
  }
}

bool isLogicalVarTerm(const Term& t, const VarSet& phiVars) {
  return t.isValue() || (t.isVariable() && phiVars.count(t.variable()));
}

}  // namespace

std::vector<Term> valuesIn(const Term& t) {
  std::vector<Term> out;
  collectValues(t, out);
  return out;
}

RuleRef calculationRule(const SymbolRef& f) {
  static std::mutex mu;
  static std::map<std::pair<std::string, std::string>, RuleRef> table;
  static const NameSupply names;
  std::lock_guard lock(mu);
  auto key = std::make_pair(f->name, f->argSorts.empty() ? std::string() : f->argSorts.front().name);
  auto& slot = table[key];
  if (!slot) slot = std::make_shared<const Rule>(calcRule(f, names));
  return slot;
}

bool respects(const Substitution& sigma, const Rule& rule) {
  VarSet all = rule.allVars();
  for (const Variable& x : sigma.domain()) {
    if (!all.count(x)) return false;
  }
  for (const Variable& x : rule.logicalVars()) {
    if (!sigma.apply(Term(x)).isValue()) return false;
  }
  Term phi = sigma.apply(rule.constraint);
  if (!phi.isGround()) return false;
  return evalGround(phi).asBool();
}

bool isLegalContraction(const Term& redex, const Rule& rule, const Substitution& tau, const Term& contractum) {
  if (rule.calculation) {
    if (redex.isVariable() || !redex.symbol().isCalculable() || !allValues(redex)) return false;
    return contractum == valueTerm(evalGround(redex));
  }
  if (!respects(tau, rule)) return false;
  return tau.apply(rule.lhs) == redex && tau.apply(rule.rhs) == contractum;
}

bool isLegalStep(const Term& s, const Position& p, const Rule& rule, const Substitution& tau, const Term& t) {
  if (!isValidPosition(s, p) || !isValidPosition(t, p)) return false;
  if (!(replace(s, p, subterm(t, p)) == t)) return false;
  return isLegalContraction(subterm(s, p), rule, tau, subterm(t, p));
}

std::vector<StepRecord> rewriteOne(const Term& t, const std::vector<Rule>& rules) {
  std::vector<StepRecord> out;
  std::vector<Term> present = valuesIn(t);
  std::vector<RuleRef> refs;
  refs.reserve(rules.size());
  for (const Rule& r : rules) refs.push_back(std::make_shared<const Rule>(r));

  for (const Position& p : functionPositions(t)) {
    const Term& s = subterm(t, p);
    if (s.symbol().isCalculable() && allValues(s)) {
      RuleRef calc = calculationRule(s.symbolRef());
      Term v = valueTerm(evalGround(s));
      Substitution sigma;
      for (std::size_t i = 0; i < s.args().size(); ++i) sigma.bind(calc->lhs.arg(i).variable(), s.arg(i));
      sigma.bind(calc->rhs.variable(), v);
      out.push_back({p, calc, sigma, replace(t, p, v), trueTerm(), {}});
    }
    for (const RuleRef& rule : refs) {
      auto matched = matchTerm(rule->lhs, s);
      if (!matched) continue;
      std::vector<Variable> free = unboundVars(*rule);
      std::vector<std::vector<Term>> options;
      for (const Variable& x : free) {
        std::vector<Term> opts;
        if (auto def = definitionOf(x, rule->constraint)) {
          Term e = matched->apply(*def);
          if (e.isGround() && e.isLogical()) {
            opts.push_back(valueTerm(evalGround(e)));
            options.push_back(std::move(opts));
            continue;
          }
        }
        for (const Term& v : present) {
          if (v.sort() == x.sort) opts.push_back(v);
        }
        options.push_back(std::move(opts));
      }
      forEachCombination(options, 4096, [&](const std::vector<Term>& pick) {
        Substitution sigma = *matched;
        for (std::size_t i = 0; i < free.size(); ++i) sigma.bind(free[i], pick[i]);
        bool ok = false;
        try {
          ok = respects(sigma, *rule);
        } catch (const Error&) {
          ok = false;
        }
        if (!ok) return;
        out.push_back({p, rule, sigma, replace(t, p, sigma.apply(rule->rhs)), trueTerm(), {}});
      });
    }
  }
  return out;
}

std::pair<Term, Term> tfTerm(const Term& t, const NameSupply& names) {
  std::vector<Term> bindings;
  std::function<Term(const Term&)> go = [&](const Term& u) -> Term {
    if (u.isVariable()) return u;
    if (u.isValue()) {
      Term z(names.fresh("z", u.sort()));
      bindings.push_back(mkEq(z, u));
      return z;
    }
    std::vector<Term> args;
    for (const Term& a : u.args()) args.push_back(go(a));
    return Term::app(u.symbolRef(), std::move(args));
  };
  Term shape = go(t);
  return {shape, mkConjunction(bindings)};
}

Rule tfRule(const Rule& rule, const NameSupply& names) {
  if (rule.calculation) return rule;
  auto [lhs, psi] = tfTerm(rule.lhs, names);
  Rule out = rule;
  out.lhs = lhs;
  out.constraint = mkConjunction({rule.constraint, psi});
  return out;
}

std::vector<Rule> tfRules(const std::vector<Rule>& rules, const NameSupply& names) {
  std::vector<Rule> out;
  out.reserve(rules.size());
  for (const Rule& r : rules) out.push_back(tfRule(r, names));
  return out;
}

Lctrs tfSystem(const Lctrs& sys, const NameSupply& names) {
  Lctrs out = sys;
  out.rules = tfRules(sys.rules, names);
  return out;
}

// ---------------------------------------------------------------------------

ConstrainedRewriter::ConstrainedRewriter(std::vector<Rule> rules, Solver& solver, NameSupply names,
                                         RewriteConfig config)
    : rules_(std::move(rules)), solver_(solver), names_(std::move(names)), config_(config) {
  for (const Rule& r : rules_) rules_ptr_.push_back(std::make_shared<const Rule>(r));
}

bool impliesFormula(Solver& solver, const Term& phi, const Term& psi) {
  std::vector<Term> have = conjuncts(phi);
  auto known = [&](const Term& c) {
    if (std::find(have.begin(), have.end(), c) != have.end()) return true;
    if (!c.isVariable() && c.symbol().op == TheoryOp::Eq) {
      if (c.arg(0) == c.arg(1)) return true;
      Term flipped = mkEq(c.arg(1), c.arg(0));
      if (std::find(have.begin(), have.end(), flipped) != have.end()) return true;
    }
    return false;
  };
  std::vector<Term> rest;
  for (const Term& c : conjuncts(psi)) {
    if (isTrueLiteral(c) || known(c)) continue;
    if (c.isGround()) {
      if (!evalGround(c).asBool()) return false;
      continue;
    }
    rest.push_back(c);
  }
  if (rest.empty()) return true;
  return solver.isValid(mkImplies(phi, mkConjunction(rest))) == Validity::Valid;
}

bool ConstrainedRewriter::implies(const Term& phi, const Term& psi) { return impliesFormula(solver_, phi, psi); }

void ConstrainedRewriter::calcSteps(const ConstrainedTerm& ct, const Position& p, std::vector<StepRecord>& out) {
  const Term& s = subterm(ct.term, p);
  if (s.isVariable() || !s.symbol().isCalculable()) return;
  VarSet phiVars = vars(ct.constraint);
  for (const Term& a : s.args()) {
    if (!isLogicalVarTerm(a, phiVars)) return;
  }
  RuleRef calc = calculationRule(s.symbolRef());
  Substitution sigma;
  for (std::size_t i = 0; i < s.args().size(); ++i) sigma.bind(calc->lhs.arg(i).variable(), s.arg(i));
  if (allValues(s)) {
    // Ground calls are evaluated in place; equivalent to binding a fresh
    // variable to the result.
    Term v = valueTerm(evalGround(s));
    sigma.bind(calc->rhs.variable(), v);
    out.push_back({p, calc, sigma, replace(ct.term, p, v), ct.constraint, {}});
    return;
  }
  Term fresh(names_.fresh("v", s.sort()));
  sigma.bind(calc->rhs.variable(), fresh);
  Term binding = mkEq(fresh, s);
  out.push_back({p, calc, sigma, replace(ct.term, p, fresh), mkConjunction({ct.constraint, binding}), {binding}});
}

void ConstrainedRewriter::ruleSteps(const ConstrainedTerm& ct, const Position& p, const RuleRef& ref,
                                    std::vector<StepRecord>& out) {
  const Rule& rule = *ref;
  const Term& s = subterm(ct.term, p);
  auto matched = matchTerm(rule.lhs, s);
  if (!matched) return;
  VarSet phiVars = vars(ct.constraint);
  VarSet lvars = rule.logicalVars();
  VarSet lhsVars = vars(rule.lhs);
  for (const Variable& x : lvars) {
    if (lhsVars.count(x) && !isLogicalVarTerm(matched->apply(Term(x)), phiVars)) return;
  }

  std::vector<Variable> free = unboundVars(rule);
  VarSet extra = rule.extraVars();
  std::vector<Term> present = valuesIn(ct.term);
  for (const Term& v : valuesIn(ct.constraint)) {
    if (std::find(present.begin(), present.end(), v) == present.end()) present.push_back(v);
  }
  std::vector<Term> phiConj = conjuncts(ct.constraint);

  // Each option is a binding plus the conjuncts it adds to the constraint.
  struct Option {
    Term value;
    std::optional<Term> added;
  };
  std::vector<std::vector<Option>> options;
  Substitution partial = *matched;
  for (const Variable& x : free) {
    std::vector<Option> opts;
    std::optional<Term> def = definitionOf(x, rule.constraint);
    if (def) {
      VarSet defVars = vars(*def);
      bool determined = std::all_of(defVars.begin(), defVars.end(), [&](const Variable& y) {
        return lhsVars.count(y) || partial.contains(y);
      });
      if (determined) {
        Term e = partial.apply(*def);
        VarSet eVars = vars(e);
        bool logical = e.isLogical() && std::all_of(eVars.begin(), eVars.end(),
                                                    [&](const Variable& y) { return phiVars.count(y) != 0; });
        if (!logical) return;
        if (e.isGround()) {
          opts.push_back({valueTerm(evalGround(e)), std::nullopt});
        } else {
          std::optional<Term> existing;
          for (const Term& c : phiConj) {
            if (c.isVariable() || c.symbol().op != TheoryOp::Eq) continue;
            if (c.arg(1) == e && c.arg(0).isVariable()) existing = c.arg(0);
            if (c.arg(0) == e && c.arg(1).isVariable()) existing = c.arg(1);
            if (existing) break;
          }
          if (existing) {
            opts.push_back({*existing, std::nullopt});
          } else {
            Term fresh(names_.fresh(x.name, x.sort));
            opts.push_back({fresh, mkEq(fresh, e)});
          }
        }
        partial.bind(x, opts.front().value);
        options.push_back(std::move(opts));
        continue;
      }
    }
    if (extra.count(x)) {
      Term fresh(names_.fresh(x.name, x.sort));
      opts.push_back({fresh, mkEq(fresh, fresh)});
    }
    for (const Variable& y : phiVars) {
      if (opts.size() >= config_.evarCap) break;
      if (y.sort == x.sort) opts.push_back({Term(y), std::nullopt});
    }
    for (const Term& v : present) {
      if (opts.size() >= config_.evarCap) break;
      if (v.sort() == x.sort) opts.push_back({v, std::nullopt});
    }
    if (opts.empty()) return;
    options.push_back(std::move(opts));
  }

  std::vector<std::size_t> idx(options.size(), 0);
  std::size_t produced = 0;
  for (;;) {
    if (produced++ >= 64) break;
    Substitution sigma = *matched;
    std::vector<Term> added;
    for (std::size_t i = 0; i < free.size(); ++i) {
      const Option& o = options[i][idx[i]];
      sigma.bind(free[i], o.value);
      if (o.added) added.push_back(*o.added);
    }
    Term phi = mkConjunction([&] {
      std::vector<Term> parts{ct.constraint};
      parts.insert(parts.end(), added.begin(), added.end());
      return parts;
    }());
    if (implies(phi, sigma.apply(rule.constraint))) {
      out.push_back({p, ref, sigma, replace(ct.term, p, sigma.apply(rule.rhs)), phi, added});
    }
    std::size_t k = 0;
    while (k < options.size()) {
      if (++idx[k] < options[k].size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == options.size()) break;
  }
}

std::vector<StepRecord> ConstrainedRewriter::contractionsAt(const ConstrainedTerm& ct, const Position& p) {
  std::vector<StepRecord> out;
  const Term& s = subterm(ct.term, p);
  if (s.isVariable() || s.isValue()) return out;
  calcSteps(ct, p, out);
  for (const RuleRef& r : rules_ptr_) ruleSteps(ct, p, r, out);
  return out;
}

std::vector<StepRecord> ConstrainedRewriter::crewriteOne(const ConstrainedTerm& ct,
                                                         const std::function<bool(const Position&)>& filter,
                                                         bool knownSatisfiable) {
  if (!knownSatisfiable && solver_.checkSat(ct.constraint) == SmtResult::Unsat) {
    diagnostics_.push_back("unsatisfiable-constraint: " + ct.toString());
    return {};
  }
  std::vector<StepRecord> out;
  for (const Position& p : functionPositions(ct.term)) {
    if (filter && !filter(p)) continue;
    if (isEquationTerm(ct.term) && p.isRoot()) continue;
    auto steps = contractionsAt(ct, p);
    out.insert(out.end(), std::make_move_iterator(steps.begin()), std::make_move_iterator(steps.end()));
  }
  return out;
}

std::vector<StepRecord> ConstrainedRewriter::stepsOnSide(const ConstrainedEquation& eq, int side,
                                                         bool knownSatisfiable) {
  unsigned s = static_cast<unsigned>(side);
  return crewriteOne(
      eq.asConstrainedTerm(), [s](const Position& p) { return !p.isRoot() && p.front() == s; }, knownSatisfiable);
}

std::vector<ConstrainedRewriter::ParallelStep> ConstrainedRewriter::cparallelOne(const ConstrainedEquation& eq,
                                                                                 int side) {
  if (side != 1 && side != 2) throw Error(ErrorKind::InvalidArgument, "side must be 1 or 2");
  ConstrainedTerm ct = eq.asConstrainedTerm();
  Position root = Position::root().child(static_cast<unsigned>(side));

  // Candidate redexes in pre-order.
  std::vector<Position> where;
  std::vector<std::vector<StepRecord>> steps;
  for (const Position& p : functionPositions(ct.term)) {
    if (!root.isPrefixOf(p)) continue;
    auto c = contractionsAt(ct, p);
    if (c.empty()) continue;
    where.push_back(p);
    steps.push_back(std::move(c));
  }

  std::vector<ParallelStep> out;
  out.push_back({eq, {}});
  std::size_t budget = config_.parallelBudget;
  bool capped = false;

  std::vector<std::size_t> chosen;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> extend;
  auto emit = [&] {
    // Apply the chosen contractions right-to-left so earlier positions
    // stay valid (they are pairwise parallel anyway).
    Term t = ct.term;
    std::vector<Term> added;
    std::vector<StepRecord> redexes;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const StepRecord& st = steps[chosen[k]][pick[k]];
      t = replace(t, st.position, subterm(st.result, st.position));
      added.insert(added.end(), st.added.begin(), st.added.end());
      redexes.push_back(st);
    }
    std::vector<Term> parts{eq.constraint};
    parts.insert(parts.end(), added.begin(), added.end());
    Term phi = mkConjunction(parts);
    for (StepRecord& r : redexes) r.constraint = phi;
    out.push_back({ConstrainedEquation::fromTerm(t, phi), std::move(redexes)});
  };
  std::function<void(std::size_t)> choose = [&](std::size_t k) {
    if (k == chosen.size()) {
      if (budget == 0) {
        capped = true;
        return;
      }
      --budget;
      emit();
      return;
    }
    for (std::size_t i = 0; i < steps[chosen[k]].size(); ++i) {
      pick[k] = i;
      choose(k + 1);
    }
  };
  extend = [&](std::size_t from) {
    for (std::size_t i = from; i < where.size(); ++i) {
      bool parallel = std::all_of(chosen.begin(), chosen.end(),
                                  [&](std::size_t c) { return where[c].isParallelTo(where[i]); });
      if (!parallel) continue;
      chosen.push_back(i);
      pick.assign(chosen.size(), 0);
      choose(0);
      if (chosen.size() < config_.maxRedexes) extend(i + 1);
      chosen.pop_back();
    }
  };
  extend(0);
  if (capped) {
    diagnostics_.push_back("combinatorial-cap-exceeded: more than " + std::to_string(config_.parallelBudget) +
                           " parallel steps from " + eq.toString());
  }
  return out;
}

}  // namespace lconf
