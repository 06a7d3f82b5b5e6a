#pragma once

#include "lconf/value.hpp"

#include <atomic>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace lconf {

enum class SymbolKind { Term, Theory, Value };

/// Interpreted operations of the built-in theories.
enum class TheoryOp { Not, And, Or, Implies, Neg, Add, Sub, Mul, Le, Ge, Lt, Gt, Eq };

struct Symbol {
  std::string name;
  std::vector<Sort> argSorts;
  Sort resultSort;
  SymbolKind kind = SymbolKind::Term;
  std::optional<TheoryOp> op;      // set for interpreted theory functions
  std::optional<Value> value;      // set iff kind == Value

  std::size_t arity() const { return argSorts.size(); }
  bool isValue() const { return kind == SymbolKind::Value; }
  bool isTheory() const { return kind != SymbolKind::Term; }
  bool isCalculable() const { return kind == SymbolKind::Theory; }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.name == b.name && a.kind == b.kind && a.argSorts == b.argSorts &&
           a.resultSort == b.resultSort;
  }
};

using SymbolRef = std::shared_ptr<const Symbol>;

struct Variable {
  std::string name;
  Sort sort;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using VarSet = std::set<Variable>;

/// Immutable, shared first-order term. Copies are cheap.
class Term {
 public:
  Term(Variable v);  // NOLINT(google-explicit-constructor)

  static Term var(std::string name, Sort sort) { return Term(Variable{std::move(name), std::move(sort)}); }
  /// Throws Error(ArityMismatch / SortMismatch) on ill-sorted input.
  static Term app(SymbolRef f, std::vector<Term> args = {});

  bool isVariable() const { return !node_->symbol; }
  bool isValue() const { return node_->symbol && node_->symbol->isValue(); }
  const Variable& variable() const { return node_->var; }
  const Symbol& symbol() const { return *node_->symbol; }
  const SymbolRef& symbolRef() const { return node_->symbol; }
  std::span<const Term> args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args.at(i); }
  const Sort& sort() const;
  std::size_t hash() const { return node_->hash; }

  bool isGround() const;
  /// Only theory symbols and variables.
  bool isLogical() const;
  /// Value payload of a value constant.
  const Value& value() const { return *node_->symbol->value; }

  std::string toString() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    Variable var;
    SymbolRef symbol;
    std::vector<Term> args;
    std::size_t hash = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

/// Sequence of 1-based argument indices; the empty path is the root.
class Position {
 public:
  Position() = default;
  explicit Position(std::vector<unsigned> path) : path_(std::move(path)) {}
  Position(std::initializer_list<unsigned> path) : path_(path) {}

  static Position root() { return {}; }

  bool isRoot() const { return path_.empty(); }
  const std::vector<unsigned>& path() const { return path_; }
  std::size_t depth() const { return path_.size(); }
  unsigned front() const { return path_.front(); }

  Position child(unsigned i) const;
  Position concat(const Position& q) const;
  /// Tail after the first index.
  Position tail() const;

  /// q.isPrefixOf(p) iff q ≤ p (p is below q).
  bool isPrefixOf(const Position& p) const;
  bool isParallelTo(const Position& p) const { return !isPrefixOf(p) && !p.isPrefixOf(*this); }
  /// p \ q for q ≤ p.
  Position relativeTo(const Position& q) const;

  std::string toString() const;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;

 private:
  std::vector<unsigned> path_;
};

struct PositionSets {
  std::vector<Position> all;
  std::vector<Position> function;  // PosF
  std::vector<Position> variable;  // PosV
};

/// Pre-order enumeration of Pos(t) partitioned into PosF and PosV.
PositionSets positions(const Term& t);
std::vector<Position> functionPositions(const Term& t);

/// Throws Error(InvalidPosition) when p does not address a subterm.
const Term& subterm(const Term& t, const Position& p);
/// Throws Error(InvalidPosition) or Error(SortMismatch).
Term replace(const Term& s, const Position& p, const Term& t);
bool isValidPosition(const Term& t, const Position& p);

void collectVars(const Term& t, VarSet& out);
VarSet vars(const Term& t);
/// Variables in order of first occurrence (left-to-right, pre-order).
std::vector<Variable> varsInOrder(const Term& t);
bool occurs(const Variable& x, const Term& t);
bool isLinear(const Term& t);
std::size_t termDepth(const Term& t);
std::size_t termSize(const Term& t);

/// Finite, sort-preserving map from variables to terms. Identity bindings are
/// never stored.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const Variable, Term>> init);

  /// Throws Error(SortMismatch) when the binding changes sorts.
  void bind(const Variable& x, const Term& t);
  const Term* lookup(const Variable& x) const;
  bool contains(const Variable& x) const { return map_.count(x) != 0; }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<Variable, Term>& bindings() const { return map_; }
  VarSet domain() const;

  Term apply(const Term& t) const;
  /// (σ ∘ τ)(x) = τ(σ(x)): apply this first, then `after`.
  Substitution then(const Substitution& after) const;
  bool isIdempotent() const;

  std::string toString() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<Variable, Term> map_;
};

inline Term apply(const Substitution& sigma, const Term& t) { return sigma.apply(t); }

/// Most general unifier with occurs check; the result is idempotent.
std::optional<Substitution> unify(const Term& s, const Term& t);
/// Simultaneous unification of several equations.
std::optional<Substitution> unifyAll(std::vector<std::pair<Term, Term>> equations);
/// σ with σ(pattern) = subject and dom(σ) ⊆ Var(pattern).
std::optional<Substitution> matchTerm(const Term& pattern, const Term& subject);
/// Extends `sigma`; returns false (leaving sigma unspecified) on failure.
bool matchInto(const Term& pattern, const Term& subject, Substitution& sigma);

/// Produces variable names never used before within one analysis run. Copies
/// share the counter, so fresh names stay unique across concurrent tasks.
class NameSupply {
 public:
  NameSupply() : counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  Variable fresh(const Variable& base) const { return fresh(base.name, base.sort); }
  Variable fresh(const std::string& base, const Sort& sort) const;

 private:
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

}  // namespace lconf

template <>
struct std::hash<lconf::Term> {
  std::size_t operator()(const lconf::Term& t) const noexcept { return t.hash(); }
};
