#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace lconf;
using namespace lconf::test;

namespace {

CriterionResult runOn(const std::string& file, Method m) {
  Lctrs sys = loadSystemFile(corpus(file));
  NameSupply names;
  Solver solver(z3Config(sys.theory.logic));
  auto cps = criticalPairs(sys, solver, names);
  CheckContext ctx{sys, cps, solver, names, {}};
  return runCriterion(m, ctx);
}

AnalysisConfig sequentialConfig(const Lctrs& sys) {
  AnalysisConfig cfg;
  cfg.solver = z3Config(sys.theory.logic);
  cfg.sequential = true;
  cfg.timeout = std::chrono::seconds(20);
  return cfg;
}

bool hasEquation(const std::vector<CriticalPair>& cps, const ConstrainedEquation& eq) {
  std::string key = equationKey(eq);
  return std::any_of(cps.begin(), cps.end(), [&](const CriticalPair& cp) { return equationKey(cp.equation) == key; });
}

}  // namespace

TEST_CASE("overlaps") {
  NameSupply names;
  Solver solver(z3Config());
  Lctrs max = loadSystemFile(corpus("max.lctrs"));
  auto ov = computeOverlaps(max, solver, names);
  CHECK(ov.size() == 6);
  for (const Overlap& o : ov) CHECK(o.position.isRoot());

  CHECK(computeOverlaps(loadSystemFile(corpus("ackermann.lctrs")), solver, names).empty());

  Lctrs sq = load("SIGNATURE f : Int -> Int; RULES f(x) -> z [x = z * z];");
  Solver nia(z3Config("QF_NIA"));
  auto self = computeOverlaps(sq, nia, names);
  REQUIRE(self.size() == 1);
  CHECK(self[0].position.isRoot());

  Lctrs dead = load("SIGNATURE f : Int -> Int; RULES f(x) -> 0 [x > 0]; f(x) -> 1 [x < 0];");
  CHECK(computeOverlaps(dead, solver, names).empty());

  CHECK(overlapRules(loadSystemFile(corpus("calc-copies.lctrs"))).size() == 2);
  Lctrs calc = load("SIGNATURE f : Int -> Int; RULES f(x + 1) -> x; f(x) -> x - x;");
  auto rules = overlapRules(calc);
  REQUIRE(rules.size() == 3);
  CHECK(rules.back().calculation);
  auto calcOv = computeOverlaps(calc, solver, names);
  CHECK(std::any_of(calcOv.begin(), calcOv.end(), [](const Overlap& o) {
    return o.rule1.calculation && o.position == Position{1};
  }));
}

TEST_CASE("critical pairs") {
  NameSupply names;
  Solver solver(z3Config());
  Lctrs max = loadSystemFile(corpus("max.lctrs"));
  auto cps = criticalPairs(max, solver, names);
  REQUIRE(cps.size() == 6);
  for (const CriticalPair& cp : cps) CHECK(cp.overlay);
  CHECK(hasEquation(cps, {V("x"), V("y"), T(max, "x >= y /\\ y >= x")}));
  CHECK(hasEquation(cps, {V("x"), T(max, "max(y, x)"), T(max, "x >= y")}));

  Lctrs ev = loadSystemFile(corpus("extra-var.lctrs"));
  auto evCps = criticalPairs(ev, solver, names);
  REQUIRE(evCps.size() == 1);
  const ConstrainedEquation& e = evCps[0].equation;
  REQUIRE(e.left.arg(0).isVariable());
  REQUIRE(e.right.arg(0).isVariable());
  Term y1 = e.left.arg(0), y2 = e.right.arg(0);
  CHECK(y1 != y2);
  auto parts = conjuncts(e.constraint);
  CHECK(parts.size() == 2);
  CHECK(std::count(parts.begin(), parts.end(), mkEq(y1, y1)) == 1);
  CHECK(std::count(parts.begin(), parts.end(), mkEq(y2, y2)) == 1);
  auto bare = criticalPairs(ev, solver, names, false);
  CHECK(isTrueLiteral(bare[0].equation.constraint));

  Lctrs par = loadSystemFile(corpus("parallel.lctrs"));
  auto parCps = criticalPairs(par, solver, names);
  CHECK(std::any_of(parCps.begin(), parCps.end(), [](const CriticalPair& cp) { return !cp.overlay; }));
}

TEST_CASE("triviality formula") {
  Lctrs sys = load("SIGNATURE f : Int * Int -> Int; g : Int -> Int; RULES f(x, y) -> x;");
  Term x = V("x"), y = V("y");
  Term phi = mkEq(x, y);
  CHECK(trivialityFormula(T(sys, "f(x, 1)"), T(sys, "f(x, 1)"), phi) == trueTerm());
  CHECK(trivialityFormula(x, y, phi) == mkEq(x, y));
  CHECK(trivialityFormula(x, y, trueTerm()) == falseTerm());
  CHECK(trivialityFormula(intTerm(1), intTerm(2), phi) == falseTerm());
  CHECK(trivialityFormula(T(sys, "f(x, 1)"), T(sys, "f(y, 1)"), phi) == mkEq(x, y));
  CHECK(trivialityFormula(T(sys, "f(x, 1)"), T(sys, "g(x)"), phi) == falseTerm());
  CHECK(trivialityFormula(T(sys, "f(x, 2)"), T(sys, "f(y, y)"), phi) == mkAnd(mkEq(x, y), mkEq(intTerm(2), y)));
}

TEST_CASE("triviality") {
  Solver solver(z3Config());
  Lctrs sys = loadSystemFile(corpus("calc-copies.lctrs"));
  CHECK(isTrivial({V("x"), V("y"), T(sys, "x >= y /\\ y >= x")}, solver));
  CHECK_FALSE(isTrivial({V("x"), V("y"), T(sys, "x >= y")}, solver));
  CHECK(isTrivial({V("x"), V("y"), T(sys, "x > 0 /\\ x < 0")}, solver));
  CHECK(isTrivial({T(sys, "g(x, 1)"), T(sys, "g(x, 1)"), trueTerm()}, solver));
  CHECK_FALSE(isTrivial({T(sys, "h(g(x, v))"), T(sys, "h(g(y, z))"), T(sys, "v = 1 + 1 /\\ z = 1 + 1")}, solver));
  CHECK(isTrivial({T(sys, "h(g(x, v))"), T(sys, "h(g(x, z))"), T(sys, "v = 1 + 1 /\\ z = 1 + 1")}, solver));
}

TEST_CASE("equation keys identify renamings") {
  ConstrainedEquation a{V("x"), V("y"), mkAnd(mkEq(V("x"), intTerm(1)), mkEq(V("y"), V("y")))};
  ConstrainedEquation b{V("u"), V("w"), mkAnd(mkEq(V("w"), V("w")), mkEq(V("u"), intTerm(1)))};
  ConstrainedEquation c{V("u"), V("w"), mkAnd(mkEq(V("w"), V("w")), mkEq(V("u"), intTerm(2)))};
  CHECK(equationKey(a) == equationKey(b));
  CHECK(equationKey(a) != equationKey(c));
}

TEST_CASE("method selectors") {
  for (Method m : {Method::Orthogonal, Method::WeaklyOrthogonal, Method::StronglyClosed, Method::ParallelClosed,
                   Method::AlmostParallelClosed, Method::Joinable})
    CHECK(methodFromKey(methodKey(m)) == m);
  CHECK_FALSE(methodFromKey("xyz"));
  CHECK(std::string(methodName(Method::StronglyClosed)) == "strongly closed");
}

TEST_CASE("criteria on the corpus") {
  CHECK(runOn("ackermann.lctrs", Method::Orthogonal).success);
  CHECK_FALSE(runOn("max.lctrs", Method::Orthogonal).success);
  CHECK_FALSE(runOn("max.lctrs", Method::WeaklyOrthogonal).success);
  CHECK(runOn("max.lctrs", Method::StronglyClosed).success);
  CHECK(runOn("parallel.lctrs", Method::ParallelClosed).success);
  CHECK_FALSE(runOn("almost-parallel.lctrs", Method::ParallelClosed).success);
  CHECK(runOn("almost-parallel.lctrs", Method::AlmostParallelClosed).success);
  CHECK(runOn("extra-var.lctrs", Method::StronglyClosed).success);
  CHECK(runOn("tf.lctrs", Method::StronglyClosed).success);
  CHECK(runOn("completion-fixed.lctrs", Method::StronglyClosed).success);
  CHECK(runOn("max.lctrs", Method::Joinable).success);
  for (Method m : {Method::StronglyClosed, Method::ParallelClosed, Method::AlmostParallelClosed}) {
    CAPTURE(methodKey(m));
    CriterionResult r = runOn("calc-copies.lctrs", m);
    CHECK_FALSE(r.success);
    CHECK_FALSE(r.reasons.empty());
  }
  CriterionResult wo = runOn("max.lctrs", Method::WeaklyOrthogonal);
  CHECK_FALSE(wo.reasons.empty());
}

TEST_CASE("weak orthogonality accepts trivial pairs") {
  Lctrs sys = load("SIGNATURE f : Int -> Int; RULES f(x) -> 0 [x >= 0]; f(x) -> x [x <= 0];");
  NameSupply names;
  Solver solver(z3Config());
  auto cps = criticalPairs(sys, solver, names);
  CheckContext ctx{sys, cps, solver, names, {}};
  CHECK_FALSE(checkOrthogonal(ctx).success);
  CHECK(checkWeaklyOrthogonal(ctx).success);
  CHECK(checkParallelClosed(ctx).success);
}

TEST_CASE("analysis verdicts and proofs replay") {
  struct Case {
    const char* file;
    Outcome outcome;
  };
  for (Case c : {Case{"max.lctrs", Outcome::Yes}, Case{"ackermann.lctrs", Outcome::Yes},
                 Case{"parallel.lctrs", Outcome::Yes}, Case{"almost-parallel.lctrs", Outcome::Yes},
                 Case{"extra-var.lctrs", Outcome::Yes}, Case{"tf.lctrs", Outcome::Yes},
                 Case{"completion-fixed.lctrs", Outcome::Yes}, Case{"calc-copies.lctrs", Outcome::Maybe},
                 Case{"completion.lctrs", Outcome::Maybe}}) {
    CAPTURE(c.file);
    Lctrs sys = loadSystemFile(corpus(c.file));
    Verdict v = analyze(sys, sequentialConfig(sys));
    CHECK(v.outcome == c.outcome);
    if (v.outcome == Outcome::Yes) {
      Solver solver(z3Config(sys.theory.logic));
      CHECK(replayProof(sys, v.cps, v.proof, solver).empty());
      CHECK(v.reasons.empty());
    } else {
      CHECK_FALSE(v.reasons.empty());
    }
  }
}

TEST_CASE("concurrent and sequential analysis agree") {
  for (const char* file : {"max.lctrs", "parallel.lctrs", "calc-copies.lctrs"}) {
    CAPTURE(file);
    Lctrs sys = loadSystemFile(corpus(file));
    AnalysisConfig seq = sequentialConfig(sys);
    AnalysisConfig conc = seq;
    conc.sequential = false;
    CHECK(analyze(sys, seq).outcome == analyze(sys, conc).outcome);
  }
}

TEST_CASE("tampered proofs are rejected") {
  Lctrs sys = loadSystemFile(corpus("max.lctrs"));
  Verdict v = analyze(sys, sequentialConfig(sys));
  REQUIRE(v.outcome == Outcome::Yes);
  Solver solver(z3Config());
  auto proof = v.proof;
  bool tampered = false;
  for (CpProof& p : proof)
    for (Closing& c : p.closings)
      if (!tampered && !c.steps.empty()) {
        c.steps.front().redexes.front().position = Position{2, 9};
        tampered = true;
      }
  REQUIRE(tampered);
  CHECK_FALSE(replayProof(sys, v.cps, proof, solver).empty());
}

TEST_CASE("timeouts and termination assumption") {
  Lctrs max = loadSystemFile(corpus("max.lctrs"));
  AnalysisConfig cfg = sequentialConfig(max);
  cfg.timeout = std::chrono::milliseconds(1);
  Verdict late = analyze(max, cfg);
  CHECK(late.outcome == Outcome::Timeout);
  CHECK_FALSE(late.method);

  AnalysisConfig j = sequentialConfig(max);
  j.criteria = {};
  j.assumeTerminating = true;
  Verdict v = analyze(max, j);
  CHECK(v.outcome == Outcome::Yes);
  CHECK(v.method == Method::Joinable);

  AnalysisConfig none = sequentialConfig(max);
  none.criteria = {Method::Orthogonal};
  CHECK(analyze(max, none).outcome == Outcome::Maybe);
}

TEST_CASE("report formats") {
  Lctrs sys = loadSystemFile(corpus("max.lctrs"));
  Verdict v = analyze(sys, sequentialConfig(sys));
  std::string text = formatText(v);
  CHECK(text.rfind("YES\n", 0) == 0);
  CHECK(text.find("critical pairs: 6") != std::string::npos);
  CHECK(text.find("proof:") != std::string::npos);
  std::string kv = formatKv(v);
  CHECK(kv.rfind("verdict=YES\n", 0) == 0);
  CHECK(kv.find("critical_pairs=6") != std::string::npos);
}

TEST_CASE("missing solver surfaces as an error") {
  Lctrs sys = loadSystemFile(corpus("max.lctrs"));
  AnalysisConfig cfg = sequentialConfig(sys);
  cfg.solver.executable = "/nonexistent/solver";
  CHECK_THROWS_AS(analyze(sys, cfg), Error);
}
