#include "support.hpp"

#include <doctest.h>

using namespace lconf;
using namespace lconf::test;

namespace {

Term ge(Term a, Term b) { return mkOp(TheoryOp::Ge, {std::move(a), std::move(b)}); }
Term gt(Term a, Term b) { return mkOp(TheoryOp::Gt, {std::move(a), std::move(b)}); }
Term lt(Term a, Term b) { return mkOp(TheoryOp::Lt, {std::move(a), std::move(b)}); }

}  // namespace

TEST_CASE("serialization") {
  CHECK(serialize(ge(V("x"), V("y")), "QF_LIA") ==
        "(set-logic QF_LIA)(declare-const x Int)(declare-const y Int)(assert (>= x y))(check-sat)\n");
  CHECK(serialize(trueTerm(), "QF_LIA") == "(set-logic QF_LIA)(assert true)(check-sat)\n");
  Term sq = mkEq(V("z"), mkOp(TheoryOp::Mul, {V("x"), V("x")}));
  CHECK(serialize(sq, "QF_NIA").find("(* x x)") != std::string::npos);
  CHECK(isNonlinear(sq));
  CHECK_FALSE(isNonlinear(mkOp(TheoryOp::Mul, {intTerm(2), V("x")})));
  CHECK(serialize(sq, "QF_NIA") == serialize(sq, "QF_NIA"));
  CHECK(toSmtLib(intTerm(-3)) == "(- 3)");
  CHECK(serialize(gt(V("x!4"), intTerm(0)), "QF_LIA").find("(declare-const x!4 Int)") != std::string::npos);
  CHECK(serialize(gt(V("not"), intTerm(0)), "QF_LIA").find("(declare-const not ") == std::string::npos);
  CHECK_THROWS_AS(serialize(V("x"), "QF_LIA"), Error);
  Term f = Term::app(termSymbol("f", {Sort::Int()}, Sort::Int()), {V("x")});
  CHECK_THROWS_AS(serialize(gt(f, intTerm(0)), "QF_LIA"), Error);
}

TEST_CASE("satisfiability") {
  Solver solver(z3Config());
  CHECK(solver.checkSat(mkAnd(ge(V("x"), V("y")), ge(V("y"), V("x")))) == SmtResult::Sat);
  CHECK(solver.checkSat(mkAnd(gt(V("x"), intTerm(0)), lt(V("x"), intTerm(0)))) == SmtResult::Unsat);
  Term m = V("m");
  CHECK(solver.checkSat(mkOr(mkAnd(gt(m, intTerm(0)), lt(m, intTerm(0))), falseTerm())) == SmtResult::Unsat);
  CHECK(solver.checkSat(trueTerm()) == SmtResult::Sat);
}

TEST_CASE("validity") {
  Solver solver(z3Config());
  Term x = V("x"), y = V("y"), z = V("z");
  Term pre = mkConjunction({ge(x, intTerm(2)), ge(y, intTerm(4)), mkEq(z, mkOp(TheoryOp::Add, {x, y}))});
  CHECK(solver.isValid(mkImplies(pre, ge(z, intTerm(6)))) == Validity::Valid);
  CHECK(solver.isValid(mkEq(x, x)) == Validity::Valid);
  CHECK(solver.isValid(ge(x, y)) == Validity::NotValid);
}

TEST_CASE("nonlinear queries widen the logic") {
  Solver solver(z3Config("QF_LIA"));
  Term x = V("x"), z = V("z");
  Term phi = mkAnd(mkEq(intTerm(16), mkOp(TheoryOp::Mul, {z, z})), lt(z, intTerm(0)));
  CHECK(solver.checkSat(phi) == SmtResult::Sat);
  CHECK(solver.checkSat(mkAnd(phi, gt(z, intTerm(0)))) == SmtResult::Unsat);
  (void)x;
}

TEST_CASE("reals") {
  Solver solver(z3Config("QF_LRA"));
  Term r = V("r", Sort::Real());
  Term half = valueTerm(parseLiteral("1/2", Sort::Real()));
  Term two = valueTerm(parseLiteral("2", Sort::Real()));
  CHECK(solver.checkSat(mkEq(mkOp(TheoryOp::Mul, {two, r}), valueTerm(parseLiteral("1", Sort::Real())))) ==
        SmtResult::Sat);
  CHECK(solver.isValid(mkImplies(mkEq(r, half), gt(r, valueTerm(parseLiteral("0", Sort::Real()))))) ==
        Validity::Valid);
}

TEST_CASE("results are memoized") {
  Solver solver(z3Config());
  Term phi = ge(V("x"), intTerm(3));
  solver.checkSat(phi);
  std::size_t runs = solver.stats().processRuns;
  solver.checkSat(phi);
  CHECK(solver.stats().processRuns == runs);
  CHECK(solver.stats().cacheHits >= 1);
}

TEST_CASE("ground validity agrees with evaluation") {
  Solver solver(z3Config());
  std::mt19937 rng(5);
  auto num = [&] { return intTerm(std::uniform_int_distribution<int>(-5, 5)(rng)); };
  Term guard = mkEq(V("u"), V("u"));
  for (int i = 0; i < 100; ++i) {
    Term a = mkOp(TheoryOp::Add, {num(), num()});
    Term phi = [&] {
      switch (i % 4) {
        case 0: return ge(a, num());
        case 1: return mkAnd(lt(num(), a), gt(a, num()));
        case 2: return mkOr(mkEq(a, num()), mkNot(ge(num(), a)));
        default: return mkImplies(gt(a, num()), lt(a, num()));
      }
    }();
    bool truth = evalGround(phi).asBool();
    CHECK((solver.isValid(phi) == Validity::Valid) == truth);
    CHECK((solver.isValid(mkImplies(guard, phi)) == Validity::Valid) == truth);
  }
}

TEST_CASE("missing solver executable") {
  SolverConfig c = z3Config();
  c.executable = "/nonexistent/solver";
  Solver solver(c);
  CHECK_THROWS_AS(solver.checkSat(ge(V("x"), V("y"))), Error);
  SolverConfig bad = z3Config();
  bad.perQueryTimeout = std::chrono::milliseconds(0);
  CHECK_THROWS_AS(Solver{bad}, Error);
}

TEST_CASE("cancellation") {
  std::stop_source stop;
  Solver solver(z3Config(), stop.get_token());
  stop.request_stop();
  CHECK_THROWS_AS(solver.checkSat(ge(V("x"), V("y"))), Cancelled);
}
