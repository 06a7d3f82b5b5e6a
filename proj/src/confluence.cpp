#include "lconf/confluence.hpp"

#include "lconf/error.hpp"
#include "lconf/theory.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace lconf {

namespace {

std::string ruleTitle(const Rule& r) { return r.calculation ? r.label : "rule " + r.label; }

void collectTheorySymbols(const Term& t, std::vector<SymbolRef>& out) {
  if (t.isVariable()) return;
  if (t.symbol().isCalculable()) {
    bool seen = std::any_of(out.begin(), out.end(), [&](const SymbolRef& f) { return *f == t.symbol(); });
    if (!seen) out.push_back(t.symbolRef());
  }
  for (const Term& a : t.args()) collectTheorySymbols(a, out);
}

bool subsetOf(const VarSet& a, const VarSet& b) {
  return std::all_of(a.begin(), a.end(), [&](const Variable& x) { return b.count(x) != 0; });
}

/// Renames the variables of a pair to their stems, adding primes on clashes.
Substitution readableNames(const std::vector<Term>& terms) {
  Substitution ren;
  std::set<std::string> used;
  std::vector<Variable> order;
  for (const Term& t : terms) {
    for (const Variable& x : varsInOrder(t)) {
      if (std::find(order.begin(), order.end(), x) == order.end()) order.push_back(x);
    }
  }
  for (const Variable& x : order) {
    std::string stem = x.name.substr(0, x.name.find('!'));
    std::string name = stem;
    while (used.count(name)) name += '\'';
    used.insert(name);
    ren.bind(x, Term::var(name, x.sort));
  }
  return ren;
}

}  // namespace

std::vector<Rule> overlapRules(const Lctrs& sys) {
  std::vector<Rule> out = sys.rules;
  std::vector<SymbolRef> theory;
  for (const Rule& r : sys.rules) collectTheorySymbols(r.lhs, theory);
  for (const SymbolRef& f : theory) out.push_back(*calculationRule(f));
  return out;
}

std::vector<Overlap> computeOverlaps(const Lctrs& sys, Solver& solver, const NameSupply& names) {
  std::vector<Rule> rules = overlapRules(sys);
  std::vector<Overlap> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = 0; j < rules.size(); ++j) {
      Rule rho2 = renameApart(rules[j], {}, names);
      Rule rho1 = renameApart(rules[i], vars(rho2.lhs), names);
      VarSet lvars = rho1.logicalVars();
      VarSet lvars2 = rho2.logicalVars();
      lvars.insert(lvars2.begin(), lvars2.end());
      for (const Position& p : functionPositions(rho2.lhs)) {
        const Term& sub = subterm(rho2.lhs, p);
        if (sub.isValue() || sub.sort() != rho1.lhs.sort()) continue;
        if (p.isRoot()) {
          bool variants = i == j || isVariant(rules[i], rules[j]);
          if (variants && subsetOf(vars(rho1.rhs), vars(rho1.lhs))) continue;
        }
        auto sigma = unify(rho1.lhs, sub);
        if (!sigma) continue;
        bool ok = std::all_of(lvars.begin(), lvars.end(), [&](const Variable& x) {
          Term v = sigma->apply(Term(x));
          return v.isVariable() || v.isValue();
        });
        if (!ok) continue;
        Term phi = mkConjunction({sigma->apply(rho1.constraint), sigma->apply(rho2.constraint)});
        SmtResult sat = solver.checkSat(phi);
        if (sat == SmtResult::Unsat) continue;
        out.push_back({rho1, rho2, p, *sigma, sat == SmtResult::Unknown});
      }
    }
  }
  return out;
}

CriticalPair criticalPair(const Overlap& o, bool withPsi) {
  const Substitution& s = o.mgu;
  Term left = replace(s.apply(o.rule2.lhs), o.position, s.apply(o.rule1.rhs));
  Term right = s.apply(o.rule2.rhs);
  std::vector<Term> psi;
  VarSet extra = o.rule1.extraVars();
  VarSet extra2 = o.rule2.extraVars();
  extra.insert(extra2.begin(), extra2.end());
  for (const Variable& x : extra) psi.push_back(s.apply(mkEq(Term(x), Term(x))));
  Term dummy = mkConjunction(psi);
  std::vector<Term> parts = conjuncts(s.apply(o.rule1.constraint));
  for (const Term& c : conjuncts(s.apply(o.rule2.constraint))) parts.push_back(c);
  if (withPsi) parts.insert(parts.end(), psi.begin(), psi.end());
  Term phi = mkConjunction(parts);
  Substitution ren = readableNames({left, right, phi});
  return CriticalPair{{ren.apply(left), ren.apply(right), ren.apply(phi)},
                      ren.apply(dummy),
                      o.position.isRoot(),
                      ruleTitle(o.rule1) + " / " + ruleTitle(o.rule2) + " at " + o.position.toString(),
                      !o.satisfiabilityUnknown};
}

std::vector<CriticalPair> criticalPairs(const Lctrs& sys, Solver& solver, const NameSupply& names, bool withPsi) {
  std::vector<CriticalPair> out;
  std::set<std::string> innerSeen;
  for (const Overlap& o : computeOverlaps(sys, solver, names)) {
    CriticalPair cp = criticalPair(o, withPsi);
    if (!cp.overlay && !innerSeen.insert(equationKey(cp.equation)).second) continue;
    out.push_back(std::move(cp));
  }
  return out;
}

Term trivialityFormula(const Term& s, const Term& t, const Term& phi) {
  if (s == t) return trueTerm();
  VarSet phiVars = vars(phi);
  auto leaf = [&](const Term& u) { return u.isValue() || (u.isVariable() && phiVars.count(u.variable())); };
  if (leaf(s) && leaf(t)) {
    if (s.isValue() && t.isValue()) return falseTerm();
    return mkEq(s, t);
  }
  if (!s.isVariable() && !t.isVariable() && s.symbol() == t.symbol() && s.args().size() == t.args().size()) {
    std::vector<Term> parts;
    for (std::size_t i = 0; i < s.args().size(); ++i) {
      Term c = trivialityFormula(s.arg(i), t.arg(i), phi);
      if (isFalseLiteral(c)) return falseTerm();
      parts.push_back(c);
    }
    return mkConjunction(parts);
  }
  return falseTerm();
}

bool isTrivial(const ConstrainedEquation& eq, Solver& solver, bool knownSatisfiable) {
  Term T = trivialityFormula(eq.left, eq.right, eq.constraint);
  if (isTrueLiteral(T)) return true;
  if (isFalseLiteral(T)) {
    if (knownSatisfiable) return false;
    return solver.checkSat(eq.constraint) == SmtResult::Unsat;
  }
  return impliesFormula(solver, eq.constraint, T);
}

std::string equationKey(const ConstrainedEquation& eq) {
  Substitution ren;
  std::size_t n = 0;
  auto visit = [&](const Term& t) {
    for (const Variable& x : varsInOrder(t)) {
      if (!ren.contains(x)) ren.bind(x, Term::var("_" + std::to_string(n++), x.sort));
    }
  };
  visit(eq.left);
  visit(eq.right);
  visit(eq.constraint);
  std::set<std::string> parts;
  for (const Term& c : conjuncts(ren.apply(eq.constraint))) {
    if (!isTrueLiteral(c)) parts.insert(c.toString());
  }
  std::string key = ren.apply(eq.left).toString() + " ≈ " + ren.apply(eq.right).toString() + " |";
  for (const std::string& p : parts) key += " " + p + ";";
  return key;
}

const char* methodName(Method m) {
  switch (m) {
    case Method::Orthogonal: return "orthogonal";
    case Method::WeaklyOrthogonal: return "weakly orthogonal";
    case Method::StronglyClosed: return "strongly closed";
    case Method::ParallelClosed: return "parallel closed";
    case Method::AlmostParallelClosed: return "almost parallel closed";
    case Method::Joinable: return "joinable critical pairs (termination assumed)";
  }
  return "?";
}

const char* methodKey(Method m) {
  switch (m) {
    case Method::Orthogonal: return "o";
    case Method::WeaklyOrthogonal: return "wo";
    case Method::StronglyClosed: return "sc";
    case Method::ParallelClosed: return "pc";
    case Method::AlmostParallelClosed: return "apc";
    case Method::Joinable: return "j";
  }
  return "?";
}

std::optional<Method> methodFromKey(std::string_view key) {
  for (Method m : {Method::Orthogonal, Method::WeaklyOrthogonal, Method::StronglyClosed, Method::ParallelClosed,
                   Method::AlmostParallelClosed, Method::Joinable}) {
    if (key == methodKey(m)) return m;
  }
  return std::nullopt;
}

const char* toString(Outcome o) {
  switch (o) {
    case Outcome::Yes: return "YES";
    case Outcome::Maybe: return "MAYBE";
    case Outcome::Timeout: return "TIMEOUT";
  }
  return "?";
}

std::string ProofStep::toString() const {
  std::ostringstream os;
  os << "side " << side << " / ";
  if (parallel) {
    os << "parallel {";
    for (std::size_t i = 0; i < redexes.size(); ++i) os << (i ? ", " : "") << redexes[i].position.tail().toString();
    os << "} / ";
    for (std::size_t i = 0; i < redexes.size(); ++i) os << (i ? ", " : "") << redexes[i].ruleName();
    os << " / ";
    for (std::size_t i = 0; i < redexes.size(); ++i) os << (i ? "; " : "") << redexes[i].substitution.toString();
  } else {
    const StepRecord& r = redexes.front();
    os << r.position.tail().toString() << " / " << r.ruleName() << " / " << r.substitution.toString();
  }
  os << " => " << after.toString();
  return os.str();
}

std::string Closing::toString() const {
  std::ostringstream os;
  os << "    " << clause << ":\n";
  for (std::size_t i = 0; i < steps.size(); ++i) os << "      " << i + 1 << ". " << steps[i].toString() << "\n";
  Term T = trivialityFormula(final.left, final.right, final.constraint);
  os << "      trivial by " << final.constraint.toString() << " => " << T.toString() << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Bounded search

namespace {

class Searcher {
 public:
  explicit Searcher(const CheckContext& ctx)
      : ctx_(ctx), rw_(tfRules(ctx.sys.rules, ctx.names), ctx.solver, ctx.names, ctx.config.rewrite) {}

  void checkStop() const {
    if (ctx_.solver.stopToken().stop_requested()) throw Cancelled{};
  }

  bool trivial(const ConstrainedEquation& eq) {
    std::string key = equationKey(eq);
    if (auto it = trivialCache_.find(key); it != trivialCache_.end()) return it->second;
    bool t = isTrivial(eq, ctx_.solver, true);
    trivialCache_.emplace(std::move(key), t);
    return t;
  }

  /// The pair's constraint is satisfiable (or closes it vacuously when not).
  /// Returns: 1 satisfiable, 0 unsatisfiable (trivial), -1 unknown.
  int rootStatus(const CriticalPair& cp) {
    if (cp.satisfiable) return 1;
    switch (ctx_.solver.checkSat(cp.equation.constraint)) {
      case SmtResult::Sat: return 1;
      case SmtResult::Unsat: return 0;
      case SmtResult::Unknown: return -1;
    }
    return -1;
  }

  std::vector<ProofStep> singleSteps(const ConstrainedEquation& eq, int side) {
    checkStop();
    std::vector<ProofStep> out;
    for (StepRecord& st : rw_.stepsOnSide(eq, side, true)) {
      ConstrainedEquation after = ConstrainedEquation::fromTerm(st.result, st.constraint);
      out.push_back({side, false, {std::move(st)}, eq, std::move(after)});
    }
    return out;
  }

  /// Parallel successors; the empty step is returned as std::nullopt.
  std::vector<std::optional<ProofStep>> parallelSteps(const ConstrainedEquation& eq, int side) {
    checkStop();
    std::vector<std::optional<ProofStep>> out;
    for (auto& ps : rw_.cparallelOne(eq, side)) {
      if (ps.redexes.empty()) {
        out.push_back(std::nullopt);
      } else {
        out.push_back(ProofStep{side, true, std::move(ps.redexes), eq, ps.result});
      }
    }
    return out;
  }

  /// Breadth-first: at most `bound` steps on `star`, then optionally one
  /// step on `opt` (0 for none); success on a trivial equation.
  std::optional<Closing> starThenOpt(const ConstrainedEquation& start, std::vector<ProofStep> prefix, int star,
                                     int opt, std::size_t bound, const std::string& clause) {
    struct Node {
      ConstrainedEquation eq;
      int parent;
      std::optional<ProofStep> via;
      std::size_t depth;
    };
    std::vector<Node> nodes{{start, -1, std::nullopt, 0}};
    std::unordered_set<std::string> seen{equationKey(start)};
    auto finish = [&](int idx, std::optional<ProofStep> last) {
      std::vector<ProofStep> path;
      for (int k = idx; k >= 0; k = nodes[k].parent) {
        if (nodes[k].via) path.push_back(*nodes[k].via);
      }
      std::reverse(path.begin(), path.end());
      std::vector<ProofStep> steps = prefix;
      steps.insert(steps.end(), path.begin(), path.end());
      ConstrainedEquation final = nodes[idx].eq;
      if (last) {
        final = last->after;
        steps.push_back(std::move(*last));
      }
      return Closing{clause, std::move(steps), final};
    };
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      checkStop();
      int idx = static_cast<int>(head);
      ConstrainedEquation eq = nodes[head].eq;
      std::size_t depth = nodes[head].depth;
      if (trivial(eq)) return finish(idx, std::nullopt);
      if (opt != 0) {
        for (ProofStep& st : singleSteps(eq, opt)) {
          if (trivial(st.after)) return finish(idx, std::move(st));
        }
      }
      if (depth >= bound) continue;
      if (nodes.size() >= ctx_.config.nodeBudget) {
        budgetHit_ = true;
        continue;
      }
      for (ProofStep& st : singleSteps(eq, star)) {
        if (!seen.insert(equationKey(st.after)).second) continue;
        ConstrainedEquation after = st.after;
        nodes.push_back({std::move(after), idx, std::move(st), depth + 1});
      }
    }
    return std::nullopt;
  }

  /// Breadth-first over steps on both sides.
  std::optional<Closing> join(const ConstrainedEquation& start, std::size_t bound) {
    struct Node {
      ConstrainedEquation eq;
      int parent;
      std::optional<ProofStep> via;
      std::size_t depth;
    };
    std::vector<Node> nodes{{start, -1, std::nullopt, 0}};
    std::unordered_set<std::string> seen{equationKey(start)};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      checkStop();
      if (trivial(nodes[head].eq)) {
        std::vector<ProofStep> path;
        for (int k = static_cast<int>(head); k >= 0; k = nodes[k].parent) {
          if (nodes[k].via) path.push_back(*nodes[k].via);
        }
        std::reverse(path.begin(), path.end());
        return Closing{"joining sequence", std::move(path), nodes[head].eq};
      }
      if (nodes[head].depth >= bound) continue;
      if (nodes.size() >= ctx_.config.nodeBudget) {
        budgetHit_ = true;
        continue;
      }
      for (int side : {1, 2}) {
        ConstrainedEquation eq = nodes[head].eq;
        for (ProofStep& st : singleSteps(eq, side)) {
          if (!seen.insert(equationKey(st.after)).second) continue;
          ConstrainedEquation after = st.after;
          nodes.push_back({std::move(after), static_cast<int>(head), std::move(st), nodes[head].depth + 1});
        }
      }
    }
    return std::nullopt;
  }

  std::optional<Closing> parallelClose(const ConstrainedEquation& eq) {
    for (auto& st : parallelSteps(eq, 1)) {
      if (!st) {
        if (trivial(eq)) return Closing{"parallel step", {}, eq};
        continue;
      }
      if (trivial(st->after)) {
        ConstrainedEquation final = st->after;
        return Closing{"parallel step", {std::move(*st)}, final};
      }
    }
    return std::nullopt;
  }

  std::optional<Closing> almostParallelClose(const ConstrainedEquation& eq, std::size_t bound) {
    for (auto& st : parallelSteps(eq, 1)) {
      std::vector<ProofStep> prefix;
      ConstrainedEquation from = eq;
      if (st) {
        from = st->after;
        prefix.push_back(std::move(*st));
      }
      if (auto c = starThenOpt(from, std::move(prefix), 2, 0, bound, "parallel step then steps on side 2")) return c;
    }
    return std::nullopt;
  }

  void collectDiagnostics(std::vector<std::string>& reasons) {
    for (const std::string& d : rw_.diagnostics()) {
      if (std::find(reasons.begin(), reasons.end(), d) == reasons.end()) reasons.push_back(d);
    }
    if (budgetHit_) reasons.push_back("search node budget exhausted");
  }

 private:
  const CheckContext& ctx_;
  ConstrainedRewriter rw_;
  std::unordered_map<std::string, bool> trivialCache_;
  bool budgetHit_ = false;
};

std::string cpLabel(std::size_t i, const CriticalPair& cp) {
  return "critical pair " + std::to_string(i + 1) + " " + cp.equation.toString();
}

template <typename CloseFn>
CriterionResult perPair(Method m, const CheckContext& ctx, Searcher& search, CloseFn&& close) {
  CriterionResult r{m, true, {}, {}};
  for (std::size_t i = 0; i < ctx.cps.size(); ++i) {
    const CriticalPair& cp = ctx.cps[i];
    int status = search.rootStatus(cp);
    if (status == 0) {
      r.proof.push_back({i, {Closing{"unsatisfiable constraint", {}, cp.equation}}});
      continue;
    }
    if (status < 0) {
      r.success = false;
      r.reasons.push_back(cpLabel(i, cp) + ": satisfiability unknown");
      continue;
    }
    std::vector<Closing> closings;
    std::string failure;
    if (!close(cp, closings, failure)) {
      r.success = false;
      r.reasons.push_back(cpLabel(i, cp) + " is not closed" + (failure.empty() ? "" : " (" + failure + ")"));
      continue;
    }
    r.proof.push_back({i, std::move(closings)});
  }
  search.collectDiagnostics(r.reasons);
  if (r.success) r.reasons.clear();
  return r;
}

}  // namespace

CriterionResult checkOrthogonal(const CheckContext& ctx) {
  CriterionResult r{Method::Orthogonal, false, {}, {}};
  if (!isLeftLinear(ctx.sys.rules)) {
    r.reasons.push_back("not left-linear");
  } else if (!ctx.cps.empty()) {
    r.reasons.push_back(std::to_string(ctx.cps.size()) + " critical pair(s)");
  } else {
    r.success = true;
  }
  return r;
}

CriterionResult checkWeaklyOrthogonal(const CheckContext& ctx) {
  if (!isLeftLinear(ctx.sys.rules)) return {Method::WeaklyOrthogonal, false, {}, {"not left-linear"}};
  Searcher search(ctx);
  return perPair(Method::WeaklyOrthogonal, ctx, search,
                 [&](const CriticalPair& cp, std::vector<Closing>& out, std::string&) {
                   if (!search.trivial(cp.equation)) return false;
                   out.push_back({"trivial", {}, cp.equation});
                   return true;
                 });
}

CriterionResult checkStronglyClosed(const CheckContext& ctx) {
  if (!isLinearSystem(ctx.sys.rules)) return {Method::StronglyClosed, false, {}, {"not linear"}};
  Searcher search(ctx);
  std::size_t bound = ctx.config.stepBound;
  return perPair(Method::StronglyClosed, ctx, search,
                 [&](const CriticalPair& cp, std::vector<Closing>& out, std::string& failure) {
                   auto c1 = search.starThenOpt(cp.equation, {}, 1, 2, bound, "steps on side 1, then at most one on side 2");
                   if (!c1) {
                     failure = "no closing with steps on side 1 first";
                     return false;
                   }
                   auto c2 = search.starThenOpt(cp.equation, {}, 2, 1, bound, "steps on side 2, then at most one on side 1");
                   if (!c2) {
                     failure = "no closing with steps on side 2 first";
                     return false;
                   }
                   out.push_back(std::move(*c1));
                   out.push_back(std::move(*c2));
                   return true;
                 });
}

CriterionResult checkParallelClosed(const CheckContext& ctx) {
  if (!isLeftLinear(ctx.sys.rules)) return {Method::ParallelClosed, false, {}, {"not left-linear"}};
  Searcher search(ctx);
  return perPair(Method::ParallelClosed, ctx, search,
                 [&](const CriticalPair& cp, std::vector<Closing>& out, std::string&) {
                   auto c = search.parallelClose(cp.equation);
                   if (!c) return false;
                   out.push_back(std::move(*c));
                   return true;
                 });
}

CriterionResult checkAlmostParallelClosed(const CheckContext& ctx) {
  if (!isLeftLinear(ctx.sys.rules)) return {Method::AlmostParallelClosed, false, {}, {"not left-linear"}};
  Searcher search(ctx);
  std::size_t bound = ctx.config.stepBound;
  return perPair(Method::AlmostParallelClosed, ctx, search,
                 [&](const CriticalPair& cp, std::vector<Closing>& out, std::string&) {
                   auto c = cp.overlay ? search.almostParallelClose(cp.equation, bound)
                                       : search.parallelClose(cp.equation);
                   if (!c) return false;
                   out.push_back(std::move(*c));
                   return true;
                 });
}

CriterionResult checkJoinableAll(const CheckContext& ctx) {
  Searcher search(ctx);
  CriterionResult r = perPair(Method::Joinable, ctx, search,
                              [&](const CriticalPair& cp, std::vector<Closing>& out, std::string&) {
                                auto c = search.join(cp.equation, ctx.config.joinBound);
                                if (!c) return false;
                                out.push_back(std::move(*c));
                                return true;
                              });
  return r;
}

CriterionResult runCriterion(Method m, const CheckContext& ctx) {
  switch (m) {
    case Method::Orthogonal: return checkOrthogonal(ctx);
    case Method::WeaklyOrthogonal: return checkWeaklyOrthogonal(ctx);
    case Method::StronglyClosed: return checkStronglyClosed(ctx);
    case Method::ParallelClosed: return checkParallelClosed(ctx);
    case Method::AlmostParallelClosed: return checkAlmostParallelClosed(ctx);
    case Method::Joinable: return checkJoinableAll(ctx);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown criterion");
}

// ---------------------------------------------------------------------------
// Driver

Verdict analyze(const Lctrs& sys, const AnalysisConfig& config) {
  using Clock = std::chrono::steady_clock;
  auto start = Clock::now();
  auto deadline = start + config.timeout;

  SolverConfig solverConfig = config.solver;
  solverConfig.logic = sys.theory.logic;

  std::vector<Method> methods;
  for (Method m : config.criteria) {
    if (m == Method::Joinable && !config.assumeTerminating) continue;
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  }
  if (config.assumeTerminating && std::find(methods.begin(), methods.end(), Method::Joinable) == methods.end()) {
    methods.push_back(Method::Joinable);
  }
  std::sort(methods.begin(), methods.end());
  if (methods.empty()) throw Error(ErrorKind::InvalidArgument, "no criterion enabled");

  struct Shared {
    std::mutex mu;
    std::condition_variable cv;
    bool cpsDone = false;
    std::vector<CriticalPair> cps;
    std::exception_ptr error;
    int running = 0;
    std::optional<CriterionResult> yes;
    std::vector<CriterionResult> finished;
  } shared;
  std::stop_source stop;
  NameSupply names;
  std::vector<std::jthread> threads;

  auto elapsed = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };
  auto stopAll = [&] {
    stop.request_stop();
    threads.clear();  // joins
  };

  Verdict v;
  {
    std::unique_lock lock(shared.mu);
    shared.running = 1;
  }
  threads.emplace_back([&] {
    try {
      Solver solver(solverConfig, stop.get_token());
      auto cps = criticalPairs(sys, solver, names, config.withPsi);
      std::lock_guard lock(shared.mu);
      shared.cps = std::move(cps);
      shared.cpsDone = true;
    } catch (const Cancelled&) {
    } catch (...) {
      std::lock_guard lock(shared.mu);
      shared.error = std::current_exception();
    }
    std::lock_guard lock(shared.mu);
    --shared.running;
    shared.cv.notify_all();
  });
  {
    std::unique_lock lock(shared.mu);
    bool done = shared.cv.wait_until(lock, deadline, [&] { return shared.running == 0; });
    if (!done) {
      lock.unlock();
      stopAll();
      v.outcome = Outcome::Timeout;
      v.elapsedMs = elapsed();
      return v;
    }
    if (shared.error) {
      auto e = shared.error;
      lock.unlock();
      stopAll();
      std::rethrow_exception(e);
    }
  }
  threads.clear();
  v.cps = shared.cps;

  auto worker = [&](std::vector<Method> todo) {
    try {
      for (Method m : todo) {
        if (stop.stop_requested()) break;
        Solver solver(solverConfig, stop.get_token());
        CheckContext ctx{sys, shared.cps, solver, names, config.check};
        CriterionResult r = runCriterion(m, ctx);
        std::lock_guard lock(shared.mu);
        bool win = r.success && !shared.yes;
        if (win) shared.yes = r;
        shared.finished.push_back(std::move(r));
        shared.cv.notify_all();
        if (win || shared.yes) break;
      }
    } catch (const Cancelled&) {
    } catch (...) {
      std::lock_guard lock(shared.mu);
      if (!shared.error) shared.error = std::current_exception();
    }
    std::lock_guard lock(shared.mu);
    --shared.running;
    shared.cv.notify_all();
  };

  {
    std::lock_guard lock(shared.mu);
    shared.running = config.sequential ? 1 : static_cast<int>(methods.size());
  }
  if (config.sequential) {
    threads.emplace_back(worker, methods);
  } else {
    for (Method m : methods) threads.emplace_back(worker, std::vector<Method>{m});
  }

  std::unique_lock lock(shared.mu);
  bool done = shared.cv.wait_until(lock, deadline, [&] {
    return shared.running == 0 || shared.yes.has_value() || shared.error != nullptr;
  });
  bool late = Clock::now() >= deadline;
  if (shared.yes && !late) {
    v.outcome = Outcome::Yes;
    v.method = shared.yes->method;
    v.proof = shared.yes->proof;
  } else if (shared.error) {
    auto e = shared.error;
    lock.unlock();
    stopAll();
    std::rethrow_exception(e);
  } else if (!done || late) {
    v.outcome = Outcome::Timeout;
  } else {
    v.outcome = Outcome::Maybe;
  }
  std::vector<CriterionResult> finished = shared.finished;
  lock.unlock();
  stopAll();
  if (v.outcome == Outcome::Maybe) {
    std::sort(finished.begin(), finished.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.method < b.method; });
    for (const CriterionResult& r : finished) {
      for (const std::string& reason : r.reasons) v.reasons.push_back(std::string(methodName(r.method)) + ": " + reason);
    }
  }
  v.elapsedMs = elapsed();
  return v;
}

std::string formatText(const Verdict& v) {
  std::ostringstream os;
  os << toString(v.outcome) << "\n";
  if (v.method) os << methodName(*v.method) << "\n";
  for (const std::string& r : v.reasons) os << "reason: " << r << "\n";
  os << "critical pairs: " << v.cps.size() << "\n";
  for (std::size_t i = 0; i < v.cps.size(); ++i) {
    os << "  " << i + 1 << ". " << v.cps[i].equation.toString() << "    (" << v.cps[i].origin << ")\n";
  }
  if (!v.proof.empty()) {
    os << "proof:\n";
    for (const CpProof& p : v.proof) {
      os << "  critical pair " << p.cp + 1 << ": " << v.cps.at(p.cp).equation.toString() << "\n";
      for (const Closing& c : p.closings) os << c.toString();
    }
  }
  return os.str();
}

std::string formatKv(const Verdict& v) {
  std::ostringstream os;
  os << "verdict=" << toString(v.outcome) << "\n";
  if (v.method) os << "method=" << methodName(*v.method) << "\n";
  os << "critical_pairs=" << v.cps.size() << "\n";
  for (std::size_t i = 0; i < v.cps.size(); ++i) os << "cp." << i + 1 << "=" << v.cps[i].equation.toString() << "\n";
  for (const std::string& r : v.reasons) os << "reason=" << r << "\n";
  os << "elapsed_ms=" << static_cast<long long>(v.elapsedMs) << "\n";
  return os.str();
}

std::vector<std::string> replayProof(const Lctrs& sys, const std::vector<CriticalPair>& cps,
                                     const std::vector<CpProof>& proof, Solver& solver) {
  std::vector<std::string> problems;
  NameSupply names;
  ConstrainedRewriter rw(tfRules(sys.rules, names), solver, names);
  for (const CpProof& p : proof) {
    if (p.cp >= cps.size()) {
      problems.push_back("proof refers to a missing critical pair");
      continue;
    }
    const CriticalPair& cp = cps[p.cp];
    for (const Closing& c : p.closings) {
      std::string where = "critical pair " + std::to_string(p.cp + 1) + " (" + c.clause + ")";
      std::string current = equationKey(cp.equation);
      for (std::size_t k = 0; k < c.steps.size(); ++k) {
        const ProofStep& st = c.steps[k];
        if (equationKey(st.before) != current) {
          problems.push_back(where + ": step " + std::to_string(k + 1) + " does not continue the derivation");
          break;
        }
        std::string target = equationKey(st.after);
        bool found = false;
        Term beforeTerm = st.before.asConstrainedTerm().term;
        bool valid = !st.redexes.empty() || st.parallel;
        for (const StepRecord& r : st.redexes) valid = valid && isValidPosition(beforeTerm, r.position);
        if (!valid) {
          problems.push_back(where + ": step " + std::to_string(k + 1) + " names an invalid position");
          break;
        }
        if (st.parallel) {
          std::vector<Position> want;
          for (const StepRecord& r : st.redexes) want.push_back(r.position);
          for (const auto& ps : rw.cparallelOne(st.before, st.side)) {
            std::vector<Position> got;
            for (const StepRecord& r : ps.redexes) got.push_back(r.position);
            if (got == want && equationKey(ps.result) == target) {
              found = true;
              break;
            }
          }
        } else {
          const StepRecord& r = st.redexes.front();
          for (const StepRecord& alt : rw.contractionsAt(st.before.asConstrainedTerm(), r.position)) {
            if (alt.ruleName() != r.ruleName()) continue;
            if (equationKey(ConstrainedEquation::fromTerm(alt.result, alt.constraint)) == target) {
              found = true;
              break;
            }
          }
        }
        if (!found) {
          problems.push_back(where + ": step " + std::to_string(k + 1) + " cannot be reproduced");
          break;
        }
        current = target;
      }
      if (equationKey(c.final) != current) {
        problems.push_back(where + ": final equation does not match the derivation");
      } else if (!isTrivial(c.final, solver)) {
        problems.push_back(where + ": final equation is not trivial");
      }
    }
  }
  return problems;
}

}  // namespace lconf
