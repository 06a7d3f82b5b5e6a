#pragma once

#include "lconf/rule.hpp"
#include "lconf/term.hpp"
#include "lconf/value.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lconf {

enum class TheoryKind { Ints, Reals };

/// A built-in theory: the numeric sort its numerals denote plus the SMT-LIB
/// logic used for side conditions. Bool is always present.
struct Theory {
  TheoryKind kind = TheoryKind::Ints;
  std::string logic = "QF_LIA";

  static Theory ints(std::string logic = "QF_LIA") { return {TheoryKind::Ints, std::move(logic)}; }
  static Theory reals(std::string logic = "QF_LRA") { return {TheoryKind::Reals, std::move(logic)}; }

  Sort numberSort() const { return kind == TheoryKind::Ints ? Sort::Int() : Sort::Real(); }
  std::string name() const { return kind == TheoryKind::Ints ? "Ints" : "Reals"; }
};

/// Interned symbol for an interpreted operation. `operandSort` selects the
/// instance for the overloaded arithmetic and comparison operators; it is
/// ignored for the boolean connectives.
SymbolRef theorySymbol(TheoryOp op, const Sort& operandSort = Sort::Int());
const char* opName(TheoryOp op);
std::size_t opArity(TheoryOp op);

SymbolRef valueSymbol(const Value& v);
Term valueTerm(const Value& v);
Term intTerm(long long i);
Term boolTerm(bool b);
Term trueTerm();
Term falseTerm();

bool isTrueLiteral(const Term& t);
bool isFalseLiteral(const Term& t);
bool isValueSymbol(const Symbol& s);

/// Parses `-7`, `true`, `3/4`. Integer numerals denote values of
/// `numberSort`; `a/b` is always Real. Throws Error(MalformedLiteral).
Value parseLiteral(std::string_view text, const Sort& numberSort = Sort::Int());
/// Convenience: Int numerals.
inline Value valueOf(std::string_view text) { return parseLiteral(text, Sort::Int()); }

/// [[t]] for ground logical terms. Throws Error(NotGround) or
/// Error(NotTheoryTerm).
Value evalGround(const Term& t);

/// Term builders for logical terms. Operand sorts pick the overloaded
/// instance.
Term mkOp(TheoryOp op, std::vector<Term> args);
Term mkNot(const Term& a);
Term mkAnd(const Term& a, const Term& b);
Term mkOr(const Term& a, const Term& b);
Term mkImplies(const Term& a, const Term& b);
Term mkEq(const Term& a, const Term& b);
/// Conjunction dropping `true` conjuncts; `true` when empty.
Term mkConjunction(const std::vector<Term>& conjuncts);
/// Splits nested ∧ into its conjuncts (left-to-right).
std::vector<Term> conjuncts(const Term& phi);

/// f(x₁,…,xₙ) → y [y = f(x₁,…,xₙ)] with fresh variables. Throws
/// Error(NotTheorySymbol) for values and term symbols.
Rule calcRule(const SymbolRef& f, const NameSupply& names);

}  // namespace lconf
