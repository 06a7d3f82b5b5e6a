#include "lconf/theory.hpp"

#include "lconf/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace lconf {

Sort Value::sort() const {
  if (isBool()) return Sort::Bool();
  if (isInt()) return Sort::Int();
  return Sort::Real();
}

std::string Value::toString() const {
  if (isBool()) return asBool() ? "true" : "false";
  if (isInt()) return asInt().str();
  const Rational& r = asReal();
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

const char* opName(TheoryOp op) {
  switch (op) {
    case TheoryOp::Not: return "not";
    case TheoryOp::And: return "/\\";
    case TheoryOp::Or: return "\\/";
    case TheoryOp::Implies: return "=>";
    case TheoryOp::Neg: return "-";
    case TheoryOp::Add: return "+";
    case TheoryOp::Sub: return "-";
    case TheoryOp::Mul: return "*";
    case TheoryOp::Le: return "<=";
    case TheoryOp::Ge: return ">=";
    case TheoryOp::Lt: return "<";
    case TheoryOp::Gt: return ">";
    case TheoryOp::Eq: return "=";
  }
  return "?";
}

std::size_t opArity(TheoryOp op) { return op == TheoryOp::Not || op == TheoryOp::Neg ? 1 : 2; }

namespace {

bool isBoolOp(TheoryOp op) {
  return op == TheoryOp::Not || op == TheoryOp::And || op == TheoryOp::Or || op == TheoryOp::Implies;
}

bool isComparison(TheoryOp op) {
  return op == TheoryOp::Le || op == TheoryOp::Ge || op == TheoryOp::Lt || op == TheoryOp::Gt ||
         op == TheoryOp::Eq;
}

SymbolRef makeOpSymbol(TheoryOp op, const Sort& operand) {
  Symbol s;
  s.name = opName(op);
  s.kind = SymbolKind::Theory;
  s.op = op;
  Sort arg = isBoolOp(op) ? Sort::Bool() : operand;
  s.argSorts.assign(opArity(op), arg);
  s.resultSort = isBoolOp(op) || isComparison(op) ? Sort::Bool() : operand;
  return std::make_shared<const Symbol>(std::move(s));
}

struct OpTable {
  std::map<std::pair<TheoryOp, std::string>, SymbolRef> table;

  OpTable() {
    constexpr std::array kAll = {TheoryOp::Not, TheoryOp::And, TheoryOp::Or,  TheoryOp::Implies,
                                 TheoryOp::Neg, TheoryOp::Add, TheoryOp::Sub, TheoryOp::Mul,
                                 TheoryOp::Le,  TheoryOp::Ge,  TheoryOp::Lt,  TheoryOp::Gt,
                                 TheoryOp::Eq};
    for (TheoryOp op : kAll) {
      if (isBoolOp(op)) {
        table[{op, "Bool"}] = makeOpSymbol(op, Sort::Bool());
        continue;
      }
      for (const Sort& s : {Sort::Int(), Sort::Real()}) table[{op, s.name}] = makeOpSymbol(op, s);
    }
    table[{TheoryOp::Eq, "Bool"}] = makeOpSymbol(TheoryOp::Eq, Sort::Bool());
  }
};

const OpTable& opTable() {
  static const OpTable t;
  return t;
}

}  // namespace

SymbolRef theorySymbol(TheoryOp op, const Sort& operandSort) {
  const auto& t = opTable().table;
  auto it = t.find({op, isBoolOp(op) ? std::string("Bool") : operandSort.name});
  if (it == t.end()) {
    throw Error(ErrorKind::UnsupportedSymbol,
                std::string("theory symbol '") + opName(op) + "' is not available at sort " + operandSort.name);
  }
  return it->second;
}

SymbolRef valueSymbol(const Value& v) {
  if (v.isBool()) {
    static const SymbolRef kTrue = std::make_shared<const Symbol>(
        Symbol{"true", {}, Sort::Bool(), SymbolKind::Value, std::nullopt, Value::boolean(true)});
    static const SymbolRef kFalse = std::make_shared<const Symbol>(
        Symbol{"false", {}, Sort::Bool(), SymbolKind::Value, std::nullopt, Value::boolean(false)});
    return v.asBool() ? kTrue : kFalse;
  }
  return std::make_shared<const Symbol>(Symbol{v.toString(), {}, v.sort(), SymbolKind::Value, std::nullopt, v});
}

Term valueTerm(const Value& v) { return Term::app(valueSymbol(v)); }
Term intTerm(long long i) { return valueTerm(Value::integer(BigInt(i))); }
Term boolTerm(bool b) { return valueTerm(Value::boolean(b)); }
Term trueTerm() { return boolTerm(true); }
Term falseTerm() { return boolTerm(false); }

bool isTrueLiteral(const Term& t) { return t.isValue() && t.value().isBool() && t.value().asBool(); }
bool isFalseLiteral(const Term& t) { return t.isValue() && t.value().isBool() && !t.value().asBool(); }
bool isValueSymbol(const Symbol& s) { return s.isValue(); }

Value parseLiteral(std::string_view text, const Sort& numberSort) {
  if (text == "true") return Value::boolean(true);
  if (text == "false") return Value::boolean(false);
  auto malformed = [&] { return Error(ErrorKind::MalformedLiteral, "malformed literal '" + std::string(text) + "'"); };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  auto slash = body.find('/');
  if (slash == std::string_view::npos) {
    if (!digits(body)) throw malformed();
    BigInt n{std::string(body)};
    if (negative) n = -n;
    if (numberSort == Sort::Real()) return Value::real(Rational(n));
    if (numberSort != Sort::Int()) throw malformed();
    return Value::integer(n);
  }
  std::string_view num = body.substr(0, slash);
  std::string_view den = body.substr(slash + 1);
  if (!digits(num) || !digits(den)) throw malformed();
  BigInt d(std::string{den});
  if (d == 0) throw malformed();
  BigInt n(std::string{num});
  if (negative) n = -n;
  return Value::real(Rational(n, d));
}

namespace {

Value evalOp(TheoryOp op, const std::vector<Value>& a) {
  auto asNumber = [](const Value& v) { return v.isInt() ? Rational(v.asInt()) : v.asReal(); };
  switch (op) {
    case TheoryOp::Not: return Value::boolean(!a[0].asBool());
    case TheoryOp::And: return Value::boolean(a[0].asBool() && a[1].asBool());
    case TheoryOp::Or: return Value::boolean(a[0].asBool() || a[1].asBool());
    case TheoryOp::Implies: return Value::boolean(!a[0].asBool() || a[1].asBool());
    case TheoryOp::Eq: return Value::boolean(a[0] == a[1]);
    default: break;
  }
  bool ints = a[0].isInt();
  if (op == TheoryOp::Neg) return ints ? Value::integer(-a[0].asInt()) : Value::real(-a[0].asReal());
  if (ints) {
    const BigInt& x = a[0].asInt();
    const BigInt& y = a[1].asInt();
    switch (op) {
      case TheoryOp::Add: return Value::integer(x + y);
      case TheoryOp::Sub: return Value::integer(x - y);
      case TheoryOp::Mul: return Value::integer(x * y);
      case TheoryOp::Le: return Value::boolean(x <= y);
      case TheoryOp::Ge: return Value::boolean(x >= y);
      case TheoryOp::Lt: return Value::boolean(x < y);
      case TheoryOp::Gt: return Value::boolean(x > y);
      default: break;
    }
  }
  Rational x = asNumber(a[0]);
  Rational y = asNumber(a[1]);
  switch (op) {
    case TheoryOp::Add: return Value::real(x + y);
    case TheoryOp::Sub: return Value::real(x - y);
    case TheoryOp::Mul: return Value::real(x * y);
    case TheoryOp::Le: return Value::boolean(x <= y);
    case TheoryOp::Ge: return Value::boolean(x >= y);
    case TheoryOp::Lt: return Value::boolean(x < y);
    case TheoryOp::Gt: return Value::boolean(x > y);
    default: break;
  }
  throw Error(ErrorKind::UnsupportedSymbol, std::string("cannot evaluate '") + opName(op) + "'");
}

}  // namespace

Value evalGround(const Term& t) {
  if (t.isVariable()) {
    throw Error(ErrorKind::NotGround, "cannot evaluate non-ground term " + t.toString());
  }
  const Symbol& f = t.symbol();
  if (f.isValue()) return *f.value;
  if (!f.op) {
    throw Error(ErrorKind::NotTheoryTerm, "term symbol '" + f.name + "' in " + t.toString() + " has no interpretation");
  }
  std::vector<Value> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(evalGround(a));
  return evalOp(*f.op, args);
}

Term mkOp(TheoryOp op, std::vector<Term> args) {
  Sort operand = args.empty() ? Sort::Bool() : args.front().sort();
  return Term::app(theorySymbol(op, operand), std::move(args));
}

Term mkNot(const Term& a) { return mkOp(TheoryOp::Not, {a}); }
Term mkAnd(const Term& a, const Term& b) { return mkOp(TheoryOp::And, {a, b}); }
Term mkOr(const Term& a, const Term& b) { return mkOp(TheoryOp::Or, {a, b}); }
Term mkImplies(const Term& a, const Term& b) { return mkOp(TheoryOp::Implies, {a, b}); }
Term mkEq(const Term& a, const Term& b) { return mkOp(TheoryOp::Eq, {a, b}); }

Term mkConjunction(const std::vector<Term>& parts) {
  std::optional<Term> acc;
  for (const Term& c : parts) {
    if (isTrueLiteral(c)) continue;
    acc = acc ? mkAnd(*acc, c) : c;
  }
  return acc ? *acc : trueTerm();
}

namespace {
void splitConjuncts(const Term& phi, std::vector<Term>& out) {
  if (!phi.isVariable() && phi.symbol().op == TheoryOp::And) {
    splitConjuncts(phi.arg(0), out);
    splitConjuncts(phi.arg(1), out);
    return;
  }
  out.push_back(phi);
}
}  // namespace

std::vector<Term> conjuncts(const Term& phi) {
  std::vector<Term> out;
  splitConjuncts(phi, out);
  return out;
}

Rule calcRule(const SymbolRef& f, const NameSupply& names) {
  if (!f || !f->isCalculable() || !f->op) {
    throw Error(ErrorKind::NotTheorySymbol,
                "no calculation rule for '" + (f ? f->name : std::string("<null>")) + "'");
  }
  std::vector<Term> xs;
  for (std::size_t i = 0; i < f->arity(); ++i) {
    xs.emplace_back(names.fresh("x" + std::to_string(i + 1), f->argSorts[i]));
  }
  Term lhs = Term::app(f, xs);
  Term y(names.fresh("y", f->resultSort));
  Rule r{lhs, y, mkEq(y, lhs), std::string("calc(") + f->name + ")", true};
  return r;
}

}  // namespace lconf
