#include "lconf/term.hpp"

#include "lconf/error.hpp"

#include <algorithm>
#include <sstream>

namespace lconf {

namespace {

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::strong_ordering compareSymbols(const Symbol& a, const Symbol& b) {
  if (auto c = a.name <=> b.name; c != 0) return c;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.resultSort <=> b.resultSort; c != 0) return c;
  return a.argSorts <=> b.argSorts;
}

// Binding strength of the concrete infix syntax; higher binds tighter.
int precedence(TheoryOp op) {
  switch (op) {
    case TheoryOp::Implies: return 0;
    case TheoryOp::Or: return 1;
    case TheoryOp::And: return 2;
    case TheoryOp::Le:
    case TheoryOp::Ge:
    case TheoryOp::Lt:
    case TheoryOp::Gt:
    case TheoryOp::Eq: return 3;
    case TheoryOp::Add:
    case TheoryOp::Sub: return 4;
    case TheoryOp::Mul: return 5;
    case TheoryOp::Neg: return 6;
    case TheoryOp::Not: return 7;
  }
  return 7;
}

bool isInfix(const Term& t) {
  if (t.isVariable()) return false;
  const auto& op = t.symbol().op;
  return op && *op != TheoryOp::Not && *op != TheoryOp::Neg;
}

int termPrecedence(const Term& t) {
  if (isInfix(t)) return precedence(*t.symbol().op);
  return 8;
}

void print(const Term& t, std::ostream& os);

void printOperand(const Term& t, bool parens, std::ostream& os) {
  if (parens) os << '(';
  print(t, os);
  if (parens) os << ')';
}

void print(const Term& t, std::ostream& os) {
  if (t.isVariable()) {
    os << t.variable().name;
    return;
  }
  const Symbol& f = t.symbol();
  if (f.isValue()) {
    os << f.name;
    return;
  }
  if (f.op == TheoryOp::Neg) {
    const Term& a = t.arg(0);
    bool atom = a.isVariable() || (!a.isValue() && !isInfix(a) && a.symbol().op != TheoryOp::Neg);
    os << '-';
    printOperand(a, !atom, os);
    return;
  }
  if (isInfix(t)) {
    TheoryOp op = *f.op;
    int p = precedence(op);
    bool rightAssoc = op == TheoryOp::Implies;
    bool comparison = p == 3;
    int lp = termPrecedence(t.arg(0));
    int rp = termPrecedence(t.arg(1));
    bool lparen = rightAssoc || comparison ? lp <= p : lp < p;
    bool rparen = rightAssoc ? rp < p : rp <= p;
    printOperand(t.arg(0), lparen, os);
    os << ' ' << f.name << ' ';
    printOperand(t.arg(1), rparen, os);
    return;
  }
  os << f.name;
  if (f.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) os << ',';
    print(t.arg(i), os);
  }
  os << ')';
}

}  // namespace

Term::Term(Variable v) {
  auto n = std::make_shared<Node>();
  n->hash = combine(std::hash<std::string>{}(v.name), std::hash<std::string>{}(v.sort.name));
  n->var = std::move(v);
  node_ = std::move(n);
}

Term Term::app(SymbolRef f, std::vector<Term> args) {
  if (!f) throw Error(ErrorKind::InvalidArgument, "null symbol");
  if (args.size() != f->arity()) {
    throw Error(ErrorKind::ArityMismatch, "symbol '" + f->name + "' expects " +
                                              std::to_string(f->arity()) + " arguments, got " +
                                              std::to_string(args.size()));
  }
  std::size_t h = combine(std::hash<std::string>{}(f->name), 0x51ed27);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].sort() != f->argSorts[i]) {
      throw Error(ErrorKind::SortMismatch, "argument " + std::to_string(i + 1) + " of '" + f->name +
                                               "' has sort " + args[i].sort().name + ", expected " +
                                               f->argSorts[i].name);
    }
    h = combine(h, args[i].hash());
  }
  auto n = std::make_shared<Node>();
  n->symbol = std::move(f);
  n->args = std::move(args);
  n->hash = h;
  return Term(std::shared_ptr<const Node>(std::move(n)));
}

const Sort& Term::sort() const {
  return node_->symbol ? node_->symbol->resultSort : node_->var.sort;
}

bool Term::isGround() const {
  if (isVariable()) return false;
  return std::all_of(args().begin(), args().end(), [](const Term& a) { return a.isGround(); });
}

bool Term::isLogical() const {
  if (isVariable()) return true;
  if (!symbol().isTheory()) return false;
  return std::all_of(args().begin(), args().end(), [](const Term& a) { return a.isLogical(); });
}

std::string Term::toString() const {
  std::ostringstream os;
  print(*this, os);
  return os.str();
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  if (a.isVariable() != b.isVariable()) return false;
  if (a.isVariable()) return a.variable() == b.variable();
  if (!(a.symbol() == b.symbol())) return false;
  return std::equal(a.args().begin(), a.args().end(), b.args().begin(), b.args().end());
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.isVariable() != b.isVariable()) {
    return a.isVariable() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.isVariable()) return a.variable() <=> b.variable();
  if (auto c = compareSymbols(a.symbol(), b.symbol()); c != 0) return c;
  return std::lexicographical_compare_three_way(a.args().begin(), a.args().end(), b.args().begin(),
                                                b.args().end());
}

// ---------------------------------------------------------------------------
// Positions

Position Position::child(unsigned i) const {
  Position p = *this;
  p.path_.push_back(i);
  return p;
}

Position Position::concat(const Position& q) const {
  Position p = *this;
  p.path_.insert(p.path_.end(), q.path_.begin(), q.path_.end());
  return p;
}

Position Position::tail() const {
  if (path_.empty()) throw Error(ErrorKind::InvalidPosition, "tail of the root position");
  return Position(std::vector<unsigned>(path_.begin() + 1, path_.end()));
}

bool Position::isPrefixOf(const Position& p) const {
  return path_.size() <= p.path_.size() && std::equal(path_.begin(), path_.end(), p.path_.begin());
}

Position Position::relativeTo(const Position& q) const {
  if (!q.isPrefixOf(*this)) {
    throw Error(ErrorKind::InvalidPosition, q.toString() + " is not above " + toString());
  }
  return Position(std::vector<unsigned>(path_.begin() + static_cast<long>(q.path_.size()), path_.end()));
}

std::string Position::toString() const {
  if (path_.empty()) return "ε";
  std::string s;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path_[i]);
  }
  return s;
}

namespace {

void collectPositions(const Term& t, const Position& here, PositionSets& out) {
  out.all.push_back(here);
  if (t.isVariable()) {
    out.variable.push_back(here);
    return;
  }
  out.function.push_back(here);
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    collectPositions(t.arg(i), here.child(static_cast<unsigned>(i + 1)), out);
  }
}

}  // namespace

PositionSets positions(const Term& t) {
  PositionSets out;
  collectPositions(t, Position::root(), out);
  return out;
}

std::vector<Position> functionPositions(const Term& t) { return positions(t).function; }

bool isValidPosition(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (unsigned i : p.path()) {
    if (cur->isVariable() || i == 0 || i > cur->args().size()) return false;
    cur = &cur->arg(i - 1);
  }
  return true;
}

const Term& subterm(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (unsigned i : p.path()) {
    if (cur->isVariable() || i == 0 || i > cur->args().size()) {
      throw Error(ErrorKind::InvalidPosition,
                  "position " + p.toString() + " is not valid in " + t.toString());
    }
    cur = &cur->arg(i - 1);
  }
  return *cur;
}

namespace {

Term replaceAt(const Term& s, const std::vector<unsigned>& path, std::size_t depth, const Term& t,
               const Position& p) {
  if (depth == path.size()) {
    if (s.sort() != t.sort()) {
      throw Error(ErrorKind::SortMismatch, "cannot replace subterm of sort " + s.sort().name +
                                               " by a term of sort " + t.sort().name);
    }
    return t;
  }
  unsigned i = path[depth];
  if (s.isVariable() || i == 0 || i > s.args().size()) {
    throw Error(ErrorKind::InvalidPosition, "position " + p.toString() + " is not valid");
  }
  std::vector<Term> args(s.args().begin(), s.args().end());
  args[i - 1] = replaceAt(args[i - 1], path, depth + 1, t, p);
  return Term::app(s.symbolRef(), std::move(args));
}

}  // namespace

Term replace(const Term& s, const Position& p, const Term& t) { return replaceAt(s, p.path(), 0, t, p); }

void collectVars(const Term& t, VarSet& out) {
  if (t.isVariable()) {
    out.insert(t.variable());
    return;
  }
  for (const Term& a : t.args()) collectVars(a, out);
}

VarSet vars(const Term& t) {
  VarSet out;
  collectVars(t, out);
  return out;
}

namespace {
void varsInOrderRec(const Term& t, std::vector<Variable>& out, VarSet& seen) {
  if (t.isVariable()) {
    if (seen.insert(t.variable()).second) out.push_back(t.variable());
    return;
  }
  for (const Term& a : t.args()) varsInOrderRec(a, out, seen);
}

void countVars(const Term& t, std::map<Variable, int>& counts) {
  if (t.isVariable()) {
    ++counts[t.variable()];
    return;
  }
  for (const Term& a : t.args()) countVars(a, counts);
}
}  // namespace

std::vector<Variable> varsInOrder(const Term& t) {
  std::vector<Variable> out;
  VarSet seen;
  varsInOrderRec(t, out, seen);
  return out;
}

bool occurs(const Variable& x, const Term& t) {
  if (t.isVariable()) return t.variable() == x;
  return std::any_of(t.args().begin(), t.args().end(), [&](const Term& a) { return occurs(x, a); });
}

bool isLinear(const Term& t) {
  std::map<Variable, int> counts;
  countVars(t, counts);
  return std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second <= 1; });
}

std::size_t termDepth(const Term& t) {
  std::size_t d = 0;
  if (!t.isVariable()) {
    for (const Term& a : t.args()) d = std::max(d, termDepth(a) + 1);
  }
  return d;
}

std::size_t termSize(const Term& t) {
  std::size_t n = 1;
  if (!t.isVariable()) {
    for (const Term& a : t.args()) n += termSize(a);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Substitutions

Substitution::Substitution(std::initializer_list<std::pair<const Variable, Term>> init) {
  for (const auto& [x, t] : init) bind(x, t);
}

void Substitution::bind(const Variable& x, const Term& t) {
  if (t.sort() != x.sort) {
    throw Error(ErrorKind::SortMismatch, "binding " + x.name + ":" + x.sort.name + " to a term of sort " +
                                             t.sort().name);
  }
  if (t.isVariable() && t.variable() == x) {
    map_.erase(x);
    return;
  }
  map_.insert_or_assign(x, t);
}

const Term* Substitution::lookup(const Variable& x) const {
  auto it = map_.find(x);
  return it == map_.end() ? nullptr : &it->second;
}

VarSet Substitution::domain() const {
  VarSet d;
  for (const auto& [x, _] : map_) d.insert(x);
  return d;
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty()) return t;
  if (t.isVariable()) {
    const Term* b = lookup(t.variable());
    return b ? *b : t;
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(apply(a));
    if (!(args.back() == a)) changed = true;
  }
  if (!changed) return t;
  return Term::app(t.symbolRef(), std::move(args));
}

Substitution Substitution::then(const Substitution& after) const {
  Substitution out;
  for (const auto& [x, t] : map_) out.bind(x, after.apply(t));
  for (const auto& [x, t] : after.map_) {
    if (!map_.count(x)) out.bind(x, t);
  }
  return out;
}

bool Substitution::isIdempotent() const {
  VarSet dom = domain();
  for (const auto& [x, t] : map_) {
    VarSet vs = vars(t);
    for (const Variable& v : vs) {
      if (dom.count(v)) return false;
    }
  }
  return true;
}

std::string Substitution::toString() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [x, t] : map_) {
    if (!first) s += ", ";
    first = false;
    s += x.name + " -> " + t.toString();
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Unification (Martelli–Montanari with occurs check) and matching

std::optional<Substitution> unifyAll(std::vector<std::pair<Term, Term>> work) {
  Substitution sigma;
  while (!work.empty()) {
    auto [a, b] = std::move(work.back());
    work.pop_back();
    a = sigma.apply(a);
    b = sigma.apply(b);
    if (a == b) continue;
    if (a.sort() != b.sort()) return std::nullopt;
    if (!a.isVariable() && b.isVariable()) std::swap(a, b);
    if (a.isVariable()) {
      const Variable& x = a.variable();
      if (occurs(x, b)) return std::nullopt;
      Substitution single;
      single.bind(x, b);
      // Keep the solved form resolved so the result stays idempotent.
      sigma = sigma.then(single);
      continue;
    }
    if (!(a.symbol() == b.symbol())) return std::nullopt;
    for (std::size_t i = a.args().size(); i-- > 0;) work.emplace_back(a.arg(i), b.arg(i));
  }
  return sigma;
}

std::optional<Substitution> unify(const Term& s, const Term& t) { return unifyAll({{s, t}}); }

bool matchInto(const Term& pattern, const Term& subject, Substitution& sigma) {
  if (pattern.sort() != subject.sort()) return false;
  if (pattern.isVariable()) {
    const Variable& x = pattern.variable();
    if (const Term* b = sigma.lookup(x)) return *b == subject;
    // Identity bindings are dropped by Substitution; callers re-check the
    // instance when pattern and subject may share variables.
    if (subject.isVariable() && subject.variable() == x) return true;
    sigma.bind(x, subject);
    return true;
  }
  if (subject.isVariable()) return false;
  if (!(pattern.symbol() == subject.symbol())) return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i) {
    if (!matchInto(pattern.arg(i), subject.arg(i), sigma)) return false;
  }
  return true;
}

std::optional<Substitution> matchTerm(const Term& pattern, const Term& subject) {
  Substitution sigma;
  if (!matchInto(pattern, subject, sigma)) return std::nullopt;
  // Identity bindings are not stored, so a non-linear pattern may have
  // slipped through (x matched x once and something else later). Verify.
  if (!(sigma.apply(pattern) == subject)) return std::nullopt;
  return sigma;
}

Variable NameSupply::fresh(const std::string& base, const Sort& sort) const {
  std::string stem = base;
  if (auto bang = stem.find('!'); bang != std::string::npos) stem.resize(bang);
  if (stem.empty()) stem = "v";
  std::uint64_t n = counter_->fetch_add(1) + 1;
  return Variable{stem + "!" + std::to_string(n), sort};
}

}  // namespace lconf
