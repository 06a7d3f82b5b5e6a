#include "support.hpp"

#include <doctest.h>

using namespace lconf;
using namespace lconf::test;

namespace {

Term add(Term a, Term b) { return mkOp(TheoryOp::Add, {std::move(a), std::move(b)}); }

Term randomGround(std::mt19937& rng, int depth) {
  int pick = std::uniform_int_distribution<int>(0, depth == 0 ? 0 : 4)(rng);
  auto leaf = [&] { return intTerm(std::uniform_int_distribution<int>(-9, 9)(rng)); };
  switch (pick) {
    case 0: return leaf();
    case 1: return add(randomGround(rng, depth - 1), randomGround(rng, depth - 1));
    case 2: return mkOp(TheoryOp::Sub, {randomGround(rng, depth - 1), randomGround(rng, depth - 1)});
    case 3: return mkOp(TheoryOp::Mul, {randomGround(rng, depth - 1), randomGround(rng, depth - 1)});
    default: return mkOp(TheoryOp::Neg, {randomGround(rng, depth - 1)});
  }
}

}  // namespace

TEST_CASE("ground evaluation") {
  CHECK(evalGround(add(intTerm(1), intTerm(2))) == Value::integer(3));
  CHECK(evalGround(mkAnd(trueTerm(), falseTerm())) == Value::boolean(false));
  CHECK(evalGround(mkOp(TheoryOp::Neg, {intTerm(5)})) == Value::integer(-5));
  CHECK(evalGround(mkImplies(falseTerm(), falseTerm())) == Value::boolean(true));
  CHECK(evalGround(mkOp(TheoryOp::Ge, {intTerm(3), intTerm(4)})) == Value::boolean(false));
  Term big = mkOp(TheoryOp::Mul, {valueTerm(valueOf("123456789012345678901234567890")), intTerm(10)});
  CHECK(evalGround(big).toString() == "1234567890123456789012345678900");
  Term half = valueTerm(parseLiteral("1/2", Sort::Real()));
  CHECK(evalGround(mkOp(TheoryOp::Add, {half, half})) == Value::real(Rational(1)));
  CHECK_THROWS_AS(evalGround(add(V("x"), intTerm(1))), Error);
}

TEST_CASE("literals") {
  CHECK(valueOf("-7") == Value::integer(-7));
  CHECK(valueOf("-7").sort() == Sort::Int());
  CHECK(parseLiteral("true") == Value::boolean(true));
  CHECK(parseLiteral("3/4", Sort::Int()).sort() == Sort::Real());
  CHECK(parseLiteral("6/8", Sort::Real()).toString() == "3/4");
  CHECK_THROWS_AS(valueOf("7x"), Error);
  CHECK_THROWS_AS(valueOf(""), Error);
  CHECK(isValueSymbol(intTerm(3).symbol()));
  CHECK_FALSE(isValueSymbol(*theorySymbol(TheoryOp::Add)));
}

TEST_CASE("calculation rules") {
  NameSupply names;
  Rule plus = calcRule(theorySymbol(TheoryOp::Add), names);
  CHECK(plus.calculation);
  CHECK(plus.rhs.isVariable());
  CHECK(plus.constraint == mkEq(plus.rhs, plus.lhs));
  CHECK(functionPositions(plus.lhs) == std::vector<Position>{Position::root()});
  CHECK(isLeftLinear({plus}));
  CHECK(plus.logicalVars().size() == 3);
  CHECK(plus.label == "calc(+)");

  Rule neg = calcRule(theorySymbol(TheoryOp::Not), names);
  CHECK(neg.lhs.args().size() == 1);
  CHECK(neg.rhs.sort() == Sort::Bool());

  Rule ge = calcRule(theorySymbol(TheoryOp::Ge), names);
  CHECK(ge.rhs.sort() == Sort::Bool());
  CHECK(ge.lhs.arg(0).sort() == Sort::Int());

  CHECK_THROWS_AS(calcRule(intTerm(3).symbolRef(), names), Error);
  CHECK_THROWS_AS(calcRule(termSymbol("f", {Sort::Int()}, Sort::Int()), names), Error);
}

TEST_CASE("conjunction helpers") {
  Term a = mkOp(TheoryOp::Ge, {V("x"), V("y")});
  Term b = mkOp(TheoryOp::Gt, {V("x"), intTerm(0)});
  CHECK(mkConjunction({}) == trueTerm());
  CHECK(mkConjunction({trueTerm(), a}) == a);
  Term ab = mkConjunction({a, b, trueTerm()});
  CHECK(conjuncts(ab) == std::vector<Term>{a, b});
  CHECK(isTrueLiteral(trueTerm()));
  CHECK(isFalseLiteral(falseTerm()));
}

TEST_CASE("ground evaluation agrees with the solver") {
  Solver solver(z3Config("QF_NIA"));
  std::mt19937 rng(3);
  for (int i = 0; i < 25; ++i) {
    Term t = randomGround(rng, 3);
    // The guard keeps the query non-ground so it reaches the solver process.
    Term guard = mkEq(V("u"), V("u"));
    CHECK(solver.isValid(mkImplies(guard, mkEq(t, valueTerm(evalGround(t))))) == Validity::Valid);
  }
  CHECK(solver.stats().processRuns > 10);
}
