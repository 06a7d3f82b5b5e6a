#include "lconf/frontend.hpp"

#include "lconf/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace lconf {

const Symbol* Signature::find(const std::string& name) const {
  auto it = symbols.find(name);
  return it == symbols.end() ? nullptr : it->second.get();
}

std::string Diagnostic::toString() const {
  std::string s = severity == Severity::Error ? "error" : "warning";
  s += " [" + code + "]";
  if (rule >= 0) s += " rule " + std::to_string(rule + 1);
  return s + ": " + message;
}

bool hasErrors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  SourceLoc loc;
  std::size_t begin = 0;
  std::size_t end = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  const Token& peek() {
    if (!peeked_) {
      tok_ = scan();
      peeked_ = true;
    }
    return tok_;
  }

  Token next() {
    peek();
    peeked_ = false;
    return tok_;
  }

  /// Next whitespace-delimited word, bypassing tokenization (solver paths).
  Token rawWord() {
    if (peeked_) {
      // Rewind to the start of the peeked token.
      pos_ = tok_.begin;
      line_ = tok_.loc.line;
      col_ = tok_.loc.column;
      peeked_ = false;
    }
    skipSpace();
    Token t;
    t.kind = Token::Kind::Ident;
    t.loc = {line_, col_};
    t.begin = pos_;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) && src_[pos_] != ';') {
      advance();
    }
    t.end = pos_;
    t.text = std::string(src_.substr(t.begin, t.end - t.begin));
    if (t.text.empty()) t.kind = Token::Kind::End;
    return t;
  }

  [[noreturn]] void fail(const SourceLoc& loc, const std::string& msg) const {
    throw Error(ErrorKind::Syntax, "syntax error at " + loc.toString() + ": " + msg);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipSpace() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token scan() {
    skipSpace();
    Token t;
    t.loc = {line_, col_};
    t.begin = pos_;
    if (pos_ >= src_.size()) {
      t.kind = Token::Kind::End;
      t.end = pos_;
      return t;
    }
    char c = src_[pos_];
    auto isIdentStart = [](char ch) { return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_'; };
    auto isIdentChar = [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'';
    };
    if (isIdentStart(c)) {
      while (pos_ < src_.size() && isIdentChar(src_[pos_])) advance();
      t.kind = Token::Kind::Ident;
      t.text = std::string(src_.substr(t.begin, pos_ - t.begin));
      if (t.text == "DEFAULT" && src_.substr(pos_, 5) == "-SORT") {
        for (int i = 0; i < 5; ++i) advance();
        t.text = "DEFAULT-SORT";
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
      t.kind = Token::Kind::Number;
      t.text = std::string(src_.substr(t.begin, pos_ - t.begin));
    } else {
      static const char* kPuncts[] = {"->", "=>", "<=", ">=", "!=", "/\\", "\\/", "(", ")", ",", ";",
                                      ":",  "[",  "]",  "+",  "-",  "*",   "<",   ">", "="};
      for (const char* p : kPuncts) {
        std::string_view pv(p);
        if (src_.substr(pos_, pv.size()) == pv) {
          for (std::size_t i = 0; i < pv.size(); ++i) advance();
          t.kind = Token::Kind::Punct;
          t.text = std::string(pv);
          break;
        }
      }
      if (t.kind != Token::Kind::Punct) fail(t.loc, std::string("unexpected character '") + c + "'");
    }
    t.end = pos_;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
  bool peeked_ = false;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  RawSystem system() {
    RawSystem sys;
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Token::Kind::Ident) break;
      if (t.text == "THEORY") {
        lex_.next();
        sys.theory = expectIdent("theory name").text;
      } else if (t.text == "LOGIC") {
        lex_.next();
        sys.logic = expectIdent("logic name").text;
      } else if (t.text == "SOLVER") {
        lex_.next();
        Token w = lex_.rawWord();
        if (w.kind == Token::Kind::End) lex_.fail(w.loc, "expected solver name");
        sys.solver = w.text;
      } else if (t.text == "DEFAULT-SORT") {
        lex_.next();
        sys.defaultSort = expectIdent("sort name").text;
      } else {
        break;
      }
      accept(";");
    }
    if (isKeyword("SIGNATURE")) {
      lex_.next();
      while (!isKeyword("RULES") && lex_.peek().kind != Token::Kind::End) sys.decls.push_back(decl());
    }
    if (!isKeyword("RULES")) lex_.fail(lex_.peek().loc, "expected RULES, found " + describe(lex_.peek()));
    lex_.next();
    while (lex_.peek().kind != Token::Kind::End) sys.rules.push_back(rule());
    if (sys.rules.empty()) lex_.fail(lex_.peek().loc, "the system has no rules");
    return sys;
  }

  RawTerm standaloneTerm() {
    RawTerm t = term();
    if (lex_.peek().kind != Token::Kind::End) lex_.fail(lex_.peek().loc, "unexpected " + describe(lex_.peek()));
    return t;
  }

 private:
  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of input";
    return "'" + t.text + "'";
  }

  bool isKeyword(const char* kw) {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::Ident && t.text == kw;
  }

  bool isPunct(const char* p) {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::Punct && t.text == p;
  }

  bool accept(const char* p) {
    if (!isPunct(p)) return false;
    lex_.next();
    return true;
  }

  Token expect(const char* p) {
    if (!isPunct(p)) lex_.fail(lex_.peek().loc, std::string("expected '") + p + "', found " + describe(lex_.peek()));
    return lex_.next();
  }

  Token expectIdent(const char* what) {
    if (lex_.peek().kind != Token::Kind::Ident) {
      lex_.fail(lex_.peek().loc, std::string("expected ") + what + ", found " + describe(lex_.peek()));
    }
    return lex_.next();
  }

  RawDecl decl() {
    Token name = expectIdent("symbol name");
    RawDecl d{name.text, {}, {}, name.loc};
    expect(":");
    std::vector<std::string> sorts;
    while (lex_.peek().kind == Token::Kind::Ident) {
      sorts.push_back(lex_.next().text);
      if (!accept("*")) accept(",");
    }
    if (accept("->") || accept("=>")) {
      d.argSorts = std::move(sorts);
      d.resultSort = expectIdent("result sort").text;
    } else {
      if (sorts.size() != 1) lex_.fail(lex_.peek().loc, "expected '->' in declaration of '" + d.name + "'");
      d.resultSort = sorts.front();
    }
    expect(";");
    return d;
  }

  RawRule rule() {
    RawRule r;
    r.loc = lex_.peek().loc;
    r.lhs = term();
    expect("->");
    r.rhs = term();
    if (accept("[")) {
      r.constraint = term();
      expect("]");
    }
    if (!accept(";") && lex_.peek().kind != Token::Kind::End) {
      lex_.fail(lex_.peek().loc, "expected ';' after rule, found " + describe(lex_.peek()));
    }
    return r;
  }

  static RawTerm op(std::string text, std::vector<RawTerm> args, SourceLoc loc) {
    return RawTerm{RawTerm::Kind::Op, std::move(text), std::move(args), loc};
  }

  RawTerm term() { return implies(); }

  RawTerm implies() {
    RawTerm lhs = disjunction();
    if (isPunct("=>")) {
      SourceLoc loc = lex_.next().loc;
      RawTerm rhs = implies();
      return op("=>", {std::move(lhs), std::move(rhs)}, loc);
    }
    return lhs;
  }

  RawTerm disjunction() {
    RawTerm acc = conjunction();
    while (isPunct("\\/")) {
      SourceLoc loc = lex_.next().loc;
      acc = op("\\/", {std::move(acc), conjunction()}, loc);
    }
    return acc;
  }

  RawTerm conjunction() {
    RawTerm acc = comparison();
    while (isPunct("/\\")) {
      SourceLoc loc = lex_.next().loc;
      acc = op("/\\", {std::move(acc), comparison()}, loc);
    }
    return acc;
  }

  RawTerm comparison() {
    RawTerm lhs = additive();
    for (const char* p : {"<=", ">=", "<", ">", "=", "!="}) {
      if (isPunct(p)) {
        SourceLoc loc = lex_.next().loc;
        return op(p, {std::move(lhs), additive()}, loc);
      }
    }
    return lhs;
  }

  RawTerm additive() {
    RawTerm acc = multiplicative();
    while (isPunct("+") || isPunct("-")) {
      Token t = lex_.next();
      acc = op(t.text, {std::move(acc), multiplicative()}, t.loc);
    }
    return acc;
  }

  RawTerm multiplicative() {
    RawTerm acc = unary();
    while (isPunct("*")) {
      SourceLoc loc = lex_.next().loc;
      acc = op("*", {std::move(acc), unary()}, loc);
    }
    return acc;
  }

  RawTerm unary() {
    if (isPunct("-")) {
      Token minus = lex_.next();
      const Token& n = lex_.peek();
      if (n.kind == Token::Kind::Number && n.begin == minus.end) {
        Token num = lex_.next();
        return RawTerm{RawTerm::Kind::Literal, "-" + num.text, {}, minus.loc};
      }
      return op("-", {unary()}, minus.loc);
    }
    return primary();
  }

  RawTerm primary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Number) {
      Token num = lex_.next();
      return RawTerm{RawTerm::Kind::Literal, num.text, {}, num.loc};
    }
    if (t.kind == Token::Kind::Ident) {
      Token name = lex_.next();
      if (name.text == "true" || name.text == "false") {
        return RawTerm{RawTerm::Kind::Literal, name.text, {}, name.loc};
      }
      if (!accept("(")) return RawTerm{RawTerm::Kind::Name, name.text, {}, name.loc};
      RawTerm call{RawTerm::Kind::Call, name.text, {}, name.loc};
      if (!isPunct(")")) {
        call.args.push_back(term());
        while (accept(",")) call.args.push_back(term());
      }
      expect(")");
      return call;
    }
    if (isPunct("(")) {
      lex_.next();
      RawTerm inner = term();
      expect(")");
      return inner;
    }
    lex_.fail(t.loc, "expected a term, found " + describe(t));
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Sort inference

class SortUnifier {
 public:
  int fresh() {
    nodes_.push_back({static_cast<int>(nodes_.size()), std::nullopt, {}});
    return nodes_.back().parent;
  }

  int fixed(const Sort& s, const std::string& origin) {
    int v = fresh();
    nodes_[v].sort = s;
    nodes_[v].origin = origin;
    return v;
  }

  int find(int v) {
    while (nodes_[v].parent != v) {
      nodes_[v].parent = nodes_[nodes_[v].parent].parent;
      v = nodes_[v].parent;
    }
    return v;
  }

  void unify(int a, int b, const std::string& site) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    auto& na = nodes_[a];
    auto& nb = nodes_[b];
    if (na.sort && nb.sort && *na.sort != *nb.sort) {
      throw Error(ErrorKind::SortConflict, "sort conflict: " + na.origin + " has sort " + na.sort->name + ", but " +
                                               nb.origin + " has sort " + nb.sort->name + " (" + site + ")");
    }
    if (!na.sort && nb.sort) {
      na.parent = b;
      return;
    }
    if (na.sort && !nb.sort) {
      nb.parent = a;
      return;
    }
    // Neither (or both, equal) concrete: keep a stable representative.
    if (a < b) {
      nb.parent = a;
    } else {
      na.parent = b;
    }
  }

  void require(int v, const Sort& s, const std::string& origin) { unify(v, fixed(s, origin), origin); }

  std::optional<Sort> sortOf(int v) { return nodes_[find(v)].sort; }

 private:
  struct Node {
    int parent;
    std::optional<Sort> sort;
    std::string origin;
  };
  std::vector<Node> nodes_;
};

struct TypedNode {
  enum class What { Var, Sym, Op, Literal };
  What what = What::Var;
  std::string name;
  TheoryOp op = TheoryOp::Add;
  bool negateEq = false;  // `!=` is built as not(s = t)
  int sortVar = -1;
  std::vector<TypedNode> kids;
  SourceLoc loc;
};

struct PendingSymbol {
  std::vector<int> args;
  int result = -1;
  SourceLoc firstUse;
};

class Typer {
 public:
  Typer(Theory theory, std::map<std::string, SymbolRef> declared, bool allowUndeclared)
      : theory_(std::move(theory)), declared_(std::move(declared)), allowUndeclared_(allowUndeclared) {}

  void noteCallNames(const RawTerm& t) {
    if (t.kind == RawTerm::Kind::Call) callNames_.insert(t.text);
    for (const RawTerm& a : t.args) noteCallNames(a);
  }

  void beginScope() { scope_.clear(); }

  int pinVariable(const std::string& name, const Sort& sort) {
    int v = variable(name, {0, 0});
    unifier_.require(v, sort, "variable '" + name + "'");
    return v;
  }

  TypedNode annotate(const RawTerm& t) {
    TypedNode n;
    n.loc = t.loc;
    std::string at = " at " + t.loc.toString();
    switch (t.kind) {
      case RawTerm::Kind::Literal: {
        n.what = TypedNode::What::Literal;
        n.name = t.text;
        Sort s = t.text == "true" || t.text == "false" ? Sort::Bool()
                 : t.text.find('/') != std::string::npos ? Sort::Real()
                                                         : theory_.numberSort();
        n.sortVar = unifier_.fixed(s, "literal " + t.text + at);
        return n;
      }
      case RawTerm::Kind::Name: {
        if (auto it = declared_.find(t.text); it != declared_.end()) {
          const Symbol& f = *it->second;
          if (f.arity() != 0) {
            throw Error(ErrorKind::ArityMismatch, "arity conflict: '" + t.text + "' declared with " +
                                                      std::to_string(f.arity()) + " arguments, used as a constant" + at);
          }
          n.what = TypedNode::What::Sym;
          n.name = t.text;
          n.sortVar = unifier_.fixed(f.resultSort, "constant '" + t.text + "'" + at);
          return n;
        }
        if (callNames_.count(t.text)) {
          throw Error(ErrorKind::ArityMismatch,
                      "arity conflict: '" + t.text + "' is applied to arguments elsewhere but used as a constant" + at);
        }
        n.what = TypedNode::What::Var;
        n.name = t.text;
        n.sortVar = variable(t.text, t.loc);
        return n;
      }
      case RawTerm::Kind::Call: {
        if (t.text == "not" && !declared_.count("not")) return annotateOp(t, TheoryOp::Not);
        n.what = TypedNode::What::Sym;
        n.name = t.text;
        for (const RawTerm& a : t.args) n.kids.push_back(annotate(a));
        std::vector<int> argSorts;
        int result = -1;
        if (auto it = declared_.find(t.text); it != declared_.end()) {
          const Symbol& f = *it->second;
          if (f.arity() != t.args.size()) {
            throw Error(ErrorKind::ArityMismatch, "arity conflict: '" + t.text + "' declared with " +
                                                      std::to_string(f.arity()) + " arguments, applied to " +
                                                      std::to_string(t.args.size()) + at);
          }
          for (std::size_t i = 0; i < f.arity(); ++i) {
            argSorts.push_back(unifier_.fixed(f.argSorts[i], "argument " + std::to_string(i + 1) + " of '" +
                                                                 t.text + "' (declared)"));
          }
          result = unifier_.fixed(f.resultSort, "'" + t.text + "' (declared)");
        } else {
          if (!allowUndeclared_) {
            throw Error(ErrorKind::Syntax, "unknown function symbol '" + t.text + "'" + at);
          }
          auto [slot, inserted] = pending_.try_emplace(t.text);
          PendingSymbol& p = slot->second;
          if (inserted) {
            p.firstUse = t.loc;
            for (std::size_t i = 0; i < t.args.size(); ++i) p.args.push_back(unifier_.fresh());
            p.result = unifier_.fresh();
          } else if (p.args.size() != t.args.size()) {
            throw Error(ErrorKind::ArityMismatch, "arity conflict: '" + t.text + "' used with " +
                                                      std::to_string(p.args.size()) + " arguments at " +
                                                      p.firstUse.toString() + " and with " +
                                                      std::to_string(t.args.size()) + at);
          }
          argSorts = p.args;
          result = p.result;
        }
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          unifier_.unify(n.kids[i].sortVar, argSorts[i],
                         "argument " + std::to_string(i + 1) + " of '" + t.text + "'" + at);
        }
        n.sortVar = result;
        return n;
      }
      case RawTerm::Kind::Op: {
        static const std::map<std::string, TheoryOp> kBinary = {
            {"+", TheoryOp::Add}, {"-", TheoryOp::Sub},  {"*", TheoryOp::Mul},   {"<=", TheoryOp::Le},
            {">=", TheoryOp::Ge}, {"<", TheoryOp::Lt},   {">", TheoryOp::Gt},    {"=", TheoryOp::Eq},
            {"!=", TheoryOp::Eq}, {"/\\", TheoryOp::And}, {"\\/", TheoryOp::Or}, {"=>", TheoryOp::Implies}};
        if (t.args.size() == 1) return annotateOp(t, TheoryOp::Neg);
        TypedNode o = annotateOp(t, kBinary.at(t.text));
        o.negateEq = t.text == "!=";
        return o;
      }
    }
    return n;
  }

  Term build(const TypedNode& n, const Sort& defaultSort) {
    switch (n.what) {
      case TypedNode::What::Var: return Term::var(n.name, resolve(n.sortVar, defaultSort));
      case TypedNode::What::Literal: {
        Sort s = resolve(n.sortVar, defaultSort);
        return valueTerm(parseLiteral(n.name, s == Sort::Bool() ? Sort::Int() : s));
      }
      case TypedNode::What::Sym: {
        std::vector<Term> args;
        for (const TypedNode& k : n.kids) args.push_back(build(k, defaultSort));
        return Term::app(symbolFor(n.name, defaultSort), std::move(args));
      }
      case TypedNode::What::Op: {
        std::vector<Term> args;
        for (const TypedNode& k : n.kids) args.push_back(build(k, defaultSort));
        Term t = mkOp(n.op, std::move(args));
        return n.negateEq ? mkNot(t) : t;
      }
    }
    throw Error(ErrorKind::InvalidArgument, "unreachable");
  }

  SortUnifier& unifier() { return unifier_; }

  SymbolRef symbolFor(const std::string& name, const Sort& defaultSort) {
    if (auto it = declared_.find(name); it != declared_.end()) return it->second;
    if (auto it = built_.find(name); it != built_.end()) return it->second;
    const PendingSymbol& p = pending_.at(name);
    Symbol s;
    s.name = name;
    for (int a : p.args) s.argSorts.push_back(resolve(a, defaultSort));
    s.resultSort = resolve(p.result, defaultSort);
    SymbolRef ref = std::make_shared<const Symbol>(std::move(s));
    built_[name] = ref;
    return ref;
  }

  std::vector<std::string> pendingNames() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : pending_) out.push_back(name);
    return out;
  }

 private:
  int variable(const std::string& name, const SourceLoc& loc) {
    auto it = scope_.find(name);
    if (it != scope_.end()) return it->second;
    int v = unifier_.fresh();
    (void)loc;
    scope_[name] = v;
    return v;
  }

  TypedNode annotateOp(const RawTerm& t, TheoryOp op) {
    TypedNode n;
    n.what = TypedNode::What::Op;
    n.op = op;
    n.loc = t.loc;
    n.name = t.text;
    std::string at = " at " + t.loc.toString();
    if (t.args.size() != opArity(op)) {
      throw Error(ErrorKind::ArityMismatch, "arity conflict: '" + t.text + "' expects " +
                                                std::to_string(opArity(op)) + " arguments" + at);
    }
    for (const RawTerm& a : t.args) n.kids.push_back(annotate(a));
    auto operand = [&](std::size_t i) {
      return "operand " + std::to_string(i + 1) + " of '" + t.text + "'" + at;
    };
    switch (op) {
      case TheoryOp::Not:
      case TheoryOp::And:
      case TheoryOp::Or:
      case TheoryOp::Implies:
        for (std::size_t i = 0; i < n.kids.size(); ++i) unifier_.require(n.kids[i].sortVar, Sort::Bool(), operand(i));
        n.sortVar = unifier_.fixed(Sort::Bool(), "result of '" + t.text + "'" + at);
        break;
      case TheoryOp::Neg:
      case TheoryOp::Add:
      case TheoryOp::Sub:
      case TheoryOp::Mul:
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          unifier_.require(n.kids[i].sortVar, theory_.numberSort(), operand(i));
        }
        n.sortVar = unifier_.fixed(theory_.numberSort(), "result of '" + t.text + "'" + at);
        break;
      case TheoryOp::Le:
      case TheoryOp::Ge:
      case TheoryOp::Lt:
      case TheoryOp::Gt:
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          unifier_.require(n.kids[i].sortVar, theory_.numberSort(), operand(i));
        }
        n.sortVar = unifier_.fixed(Sort::Bool(), "result of '" + t.text + "'" + at);
        break;
      case TheoryOp::Eq:
        unifier_.unify(n.kids[0].sortVar, n.kids[1].sortVar, "operands of '" + t.text + "'" + at);
        n.sortVar = unifier_.fixed(Sort::Bool(), "result of '" + t.text + "'" + at);
        break;
    }
    return n;
  }

  Sort resolve(int v, const Sort& defaultSort) {
    auto s = unifier_.sortOf(v);
    return s ? *s : defaultSort;
  }

  Theory theory_;
  std::map<std::string, SymbolRef> declared_;
  bool allowUndeclared_;
  std::set<std::string> callNames_;
  std::map<std::string, int> scope_;
  std::map<std::string, PendingSymbol> pending_;
  std::map<std::string, SymbolRef> built_;
  SortUnifier unifier_;
};

bool reservedName(const std::string& name) {
  static const std::set<std::string> kReserved = {"not", "true", "false", "THEORY", "LOGIC", "SOLVER",
                                                  "SIGNATURE", "RULES"};
  return kReserved.count(name) != 0;
}

Theory theoryFor(const RawSystem& raw) {
  std::string name = raw.theory.value_or("Ints");
  Theory th;
  if (name == "Ints" || name == "Int" || name == "Integers") {
    th = Theory::ints();
  } else if (name == "Reals" || name == "Real") {
    th = Theory::reals();
  } else {
    throw Error(ErrorKind::UnsupportedSymbol, "unsupported theory '" + name + "' (expected Ints or Reals)");
  }
  if (raw.logic) th.logic = *raw.logic;
  return th;
}

}  // namespace

RawSystem parse(std::string_view text) { return Parser(text).system(); }

Lctrs inferSorts(const RawSystem& raw) {
  Lctrs sys;
  sys.theory = theoryFor(raw);
  sys.solver = raw.solver;
  if (raw.defaultSort) sys.defaultSort = Sort{*raw.defaultSort};

  std::map<std::string, SymbolRef> declared;
  std::set<Sort> sorts{Sort::Bool(), sys.theory.numberSort()};
  for (const RawDecl& d : raw.decls) {
    if (reservedName(d.name)) {
      throw Error(ErrorKind::Syntax, "syntax error at " + d.loc.toString() + ": '" + d.name + "' is reserved");
    }
    if (declared.count(d.name)) {
      throw Error(ErrorKind::Syntax, "syntax error at " + d.loc.toString() + ": '" + d.name + "' declared twice");
    }
    Symbol s;
    s.name = d.name;
    for (const std::string& a : d.argSorts) s.argSorts.push_back(Sort{a});
    s.resultSort = Sort{d.resultSort};
    for (const Sort& a : s.argSorts) sorts.insert(a);
    sorts.insert(s.resultSort);
    declared[d.name] = std::make_shared<const Symbol>(std::move(s));
  }

  Typer typer(sys.theory, declared, true);
  for (const RawRule& r : raw.rules) {
    typer.noteCallNames(r.lhs);
    typer.noteCallNames(r.rhs);
    if (r.constraint) typer.noteCallNames(*r.constraint);
  }

  struct Annotated {
    TypedNode lhs, rhs;
    std::optional<TypedNode> constraint;
  };
  std::vector<Annotated> annotated;
  for (std::size_t i = 0; i < raw.rules.size(); ++i) {
    const RawRule& r = raw.rules[i];
    typer.beginScope();
    Annotated a{typer.annotate(r.lhs), typer.annotate(r.rhs), std::nullopt};
    std::string site = "rule " + std::to_string(i + 1) + " at " + r.loc.toString();
    typer.unifier().unify(a.lhs.sortVar, a.rhs.sortVar, "left- and right-hand side of " + site);
    if (r.constraint) {
      a.constraint = typer.annotate(*r.constraint);
      typer.unifier().require(a.constraint->sortVar, Sort::Bool(), "constraint of " + site);
    }
    annotated.push_back(std::move(a));
  }

  for (std::size_t i = 0; i < annotated.size(); ++i) {
    const Annotated& a = annotated[i];
    Rule rule{typer.build(a.lhs, sys.defaultSort), typer.build(a.rhs, sys.defaultSort),
              a.constraint ? typer.build(*a.constraint, sys.defaultSort) : trueTerm(), std::to_string(i + 1), false};
    sys.rules.push_back(std::move(rule));
  }
  for (const auto& [name, ref] : declared) sys.signature.symbols[name] = ref;
  for (const std::string& name : typer.pendingNames()) {
    SymbolRef ref = typer.symbolFor(name, sys.defaultSort);
    for (const Sort& a : ref->argSorts) sorts.insert(a);
    sorts.insert(ref->resultSort);
    sys.signature.symbols[name] = ref;
  }
  sys.signature.sorts.assign(sorts.begin(), sorts.end());

  if (!raw.logic) {
    bool nonlinear = std::any_of(sys.rules.begin(), sys.rules.end(), [](const Rule& r) {
      return isNonlinear(r.lhs) || isNonlinear(r.rhs) || isNonlinear(r.constraint);
    });
    if (nonlinear) sys.theory.logic = sys.theory.kind == TheoryKind::Ints ? "QF_NIA" : "QF_NRA";
  }
  return sys;
}

Lctrs loadSystem(std::string_view text) { return inferSorts(parse(text)); }

Lctrs loadSystemFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return loadSystem(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::vector<Diagnostic> validate(const Lctrs& sys, Solver* solver) {
  std::vector<Diagnostic> out;
  auto error = [&](int rule, std::string code, std::string msg) {
    out.push_back({Diagnostic::Severity::Error, std::move(code), std::move(msg), rule});
  };
  auto warning = [&](int rule, std::string code, std::string msg) {
    out.push_back({Diagnostic::Severity::Warning, std::move(code), std::move(msg), rule});
  };
  for (std::size_t i = 0; i < sys.rules.size(); ++i) {
    const Rule& r = sys.rules[i];
    int idx = static_cast<int>(i);
    if (r.lhs.isVariable()) {
      error(idx, "variable-lhs", "left-hand side " + r.lhs.toString() + " is a variable");
    } else if (r.lhs.symbol().isTheory()) {
      error(idx, "theory-root-lhs", "theory root in lhs: '" + r.lhs.symbol().name + "'");
    }
    if (r.lhs.sort() != r.rhs.sort()) {
      error(idx, "sort-mismatch", "left-hand side has sort " + r.lhs.sort().name + " but right-hand side has sort " +
                                      r.rhs.sort().name);
    }
    if (r.constraint.sort() != Sort::Bool()) {
      error(idx, "sort-mismatch", "constraint has sort " + r.constraint.sort().name);
    }
    if (!r.constraint.isLogical()) {
      error(idx, "constraint-not-logical", "constraint " + r.constraint.toString() + " contains term symbols");
    }
    for (const Variable& x : r.logicalVars()) {
      if (!x.sort.isTheorySort()) {
        error(idx, "logical-variable-sort",
              "logical variable " + x.name + " has sort " + x.sort.name + ", which has no values");
      }
    }
    VarSet inRule = vars(r.lhs);
    collectVars(r.rhs, inRule);
    for (const Variable& x : vars(r.constraint)) {
      if (!inRule.count(x)) {
        warning(idx, "foreign-constraint-variable",
                "constraint variable " + x.name + " occurs in neither side of the rule");
      }
    }
    if (solver && r.constraint.isLogical() && r.constraint.sort() == Sort::Bool() && !isTrueLiteral(r.constraint)) {
      bool sortsOk = true;
      for (const Variable& x : vars(r.constraint)) sortsOk = sortsOk && x.sort.isTheorySort();
      if (sortsOk && solver->checkSat(r.constraint) == SmtResult::Unsat) {
        warning(idx, "unsatisfiable-constraint", "constraint " + r.constraint.toString() + " is unsatisfiable");
      }
    }
  }
  return out;
}

std::string print(const Lctrs& sys) {
  std::ostringstream os;
  os << "THEORY " << sys.theory.name() << "\n";
  os << "LOGIC " << sys.theory.logic << "\n";
  if (sys.solver) os << "SOLVER " << *sys.solver << "\n";
  if (sys.defaultSort != Sort::Int()) os << "DEFAULT-SORT " << sys.defaultSort.name << "\n";
  os << "SIGNATURE\n";
  for (const auto& [name, f] : sys.signature.symbols) {
    os << "  " << name << " :";
    for (const Sort& a : f->argSorts) os << ' ' << a.name;
    os << " -> " << f->resultSort.name << " ;\n";
  }
  os << "RULES\n";
  for (const Rule& r : sys.rules) os << "  " << r.toString() << " ;\n";
  return os.str();
}

std::vector<Term> parseTerms(const Lctrs& sys, const std::vector<std::string>& texts,
                             const std::map<std::string, Sort>& varSorts) {
  std::vector<RawTerm> raws;
  for (const std::string& t : texts) raws.push_back(Parser(t).standaloneTerm());
  Typer typer(sys.theory, sys.signature.symbols, false);
  typer.beginScope();
  for (const auto& [name, sort] : varSorts) typer.pinVariable(name, sort);
  std::vector<TypedNode> nodes;
  for (const RawTerm& r : raws) nodes.push_back(typer.annotate(r));
  std::vector<Term> out;
  for (const TypedNode& n : nodes) out.push_back(typer.build(n, sys.defaultSort));
  return out;
}

Term parseTerm(const Lctrs& sys, std::string_view text, const std::map<std::string, Sort>& varSorts) {
  return parseTerms(sys, {std::string(text)}, varSorts).front();
}

}  // namespace lconf
