#pragma once

#define DOCTEST_STRINGIFY(...) ::doctest::toString(__VA_ARGS__)

#include "lconf/confluence.hpp"
#include "lconf/error.hpp"
#include "lconf/frontend.hpp"
#include "lconf/rewrite.hpp"
#include "lconf/smt.hpp"
#include "lconf/term.hpp"
#include "lconf/theory.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace lconf::test {

inline std::string corpus(const std::string& name) { return std::string(LCONF_CORPUS_DIR) + "/" + name; }

inline SymbolRef termSymbol(const std::string& name, std::vector<Sort> args, Sort result) {
  auto s = std::make_shared<Symbol>();
  s->name = name;
  s->argSorts = std::move(args);
  s->resultSort = std::move(result);
  s->kind = SymbolKind::Term;
  return s;
}

inline Term V(const std::string& name, const Sort& s = Sort::Int()) { return Term::var(name, s); }

inline SolverConfig z3Config(std::string logic = "QF_LIA") {
  SolverConfig c;
  c.logic = std::move(logic);
  return c;
}

/// Parses terms against a loaded system; variables default to Int.
inline Term T(const Lctrs& sys, const std::string& text) { return parseTerm(sys, text); }

inline Lctrs load(const std::string& text) { return loadSystem(text); }

/// Every map from `xs` into {lo..hi}.
inline std::vector<Substitution> intAssignments(const std::vector<Variable>& xs, int lo, int hi) {
  std::vector<Substitution> out{Substitution{}};
  for (const Variable& x : xs) {
    std::vector<Substitution> next;
    for (const Substitution& s : out) {
      for (int v = lo; v <= hi; ++v) {
        Substitution t = s;
        t.bind(x, intTerm(v));
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline bool holds(const Term& phi, const Substitution& gamma) { return evalGround(gamma.apply(phi)).asBool(); }

}  // namespace lconf::test

#include <doctest.h>

namespace doctest {
template <>
struct StringMaker<lconf::SmtResult> {
  static String convert(lconf::SmtResult r) { return lconf::toString(r); }
};
template <>
struct StringMaker<lconf::Validity> {
  static String convert(lconf::Validity v) { return lconf::toString(v); }
};
template <>
struct StringMaker<lconf::Outcome> {
  static String convert(lconf::Outcome o) { return lconf::toString(o); }
};
template <>
struct StringMaker<lconf::Term> {
  static String convert(const lconf::Term& t) { return t.toString().c_str(); }
};
template <>
struct StringMaker<lconf::Value> {
  static String convert(const lconf::Value& v) { return v.toString().c_str(); }
};
}  // namespace doctest
