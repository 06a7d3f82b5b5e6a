#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>
#include <variant>

namespace lconf {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct Sort {
  std::string name;

  static Sort Int() { return {"Int"}; }
  static Sort Bool() { return {"Bool"}; }
  static Sort Real() { return {"Real"}; }

  bool isTheorySort() const { return name == "Int" || name == "Bool" || name == "Real"; }

  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;
};

/// A carrier element of a theory sort: booleans, arbitrary-precision
/// integers, or exact rationals.
class Value {
 public:
  static Value boolean(bool b) { return Value(b); }
  static Value integer(BigInt i) { return Value(std::move(i)); }
  static Value real(Rational r) { return Value(std::move(r)); }

  bool isBool() const { return std::holds_alternative<bool>(payload_); }
  bool isInt() const { return std::holds_alternative<BigInt>(payload_); }
  bool isReal() const { return std::holds_alternative<Rational>(payload_); }

  bool asBool() const { return std::get<bool>(payload_); }
  const BigInt& asInt() const { return std::get<BigInt>(payload_); }
  const Rational& asReal() const { return std::get<Rational>(payload_); }

  Sort sort() const;

  /// Canonical literal text: `true`, `-7`, `3/4`. Parsing it back with
  /// `parseLiteral` at the same sort yields an equal value.
  std::string toString() const;

  friend bool operator==(const Value& a, const Value& b) { return a.payload_ == b.payload_; }

 private:
  explicit Value(bool b) : payload_(b) {}
  explicit Value(BigInt i) : payload_(std::move(i)) {}
  explicit Value(Rational r) : payload_(std::move(r)) {}

  std::variant<bool, BigInt, Rational> payload_;
};

}  // namespace lconf
