#include "lconf/rule.hpp"

#include "lconf/theory.hpp"

#include <algorithm>

namespace lconf {

VarSet Rule::allVars() const {
  VarSet vs;
  collectVars(lhs, vs);
  collectVars(rhs, vs);
  collectVars(constraint, vs);
  return vs;
}

VarSet Rule::logicalVars() const {
  VarSet out = vars(constraint);
  VarSet left = vars(lhs);
  for (const Variable& x : vars(rhs)) {
    if (!left.count(x)) out.insert(x);
  }
  return out;
}

VarSet Rule::extraVars() const {
  VarSet out;
  VarSet left = vars(lhs);
  VarSet phi = vars(constraint);
  for (const Variable& x : vars(rhs)) {
    if (!left.count(x) && !phi.count(x)) out.insert(x);
  }
  return out;
}

std::string Rule::toString() const {
  std::string s = lhs.toString() + " -> " + rhs.toString();
  if (!isTrueLiteral(constraint)) s += " [" + constraint.toString() + "]";
  return s;
}

Rule renameApart(const Rule& rule, const VarSet& /*avoid*/, const NameSupply& names) {
  // Fresh names never collide with anything that exists, so `avoid` only
  // documents intent at call sites.
  Substitution rho;
  for (const Variable& x : rule.allVars()) rho.bind(x, Term(names.fresh(x)));
  return Rule{rho.apply(rule.lhs), rho.apply(rule.rhs), rho.apply(rule.constraint), rule.label,
              rule.calculation};
}

std::optional<Substitution> variantRenaming(const Rule& a, const Rule& b) {
  Substitution sigma;
  if (!matchInto(a.lhs, b.lhs, sigma) || !matchInto(a.rhs, b.rhs, sigma) ||
      !matchInto(a.constraint, b.constraint, sigma)) {
    return std::nullopt;
  }
  if (!(sigma.apply(a.lhs) == b.lhs && sigma.apply(a.rhs) == b.rhs &&
        sigma.apply(a.constraint) == b.constraint)) {
    return std::nullopt;
  }
  VarSet image;
  VarSet domain = a.allVars();
  for (const Variable& x : domain) {
    Term t = sigma.apply(Term(x));
    if (!t.isVariable()) return std::nullopt;
    if (!image.insert(t.variable()).second) return std::nullopt;
  }
  return sigma;
}

bool isVariant(const Rule& a, const Rule& b) { return variantRenaming(a, b).has_value(); }

bool isLeftLinear(const std::vector<Rule>& rules) {
  return std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return isLinear(r.lhs); });
}

bool isRightLinear(const std::vector<Rule>& rules) {
  return std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return isLinear(r.rhs); });
}

bool isLinearSystem(const std::vector<Rule>& rules) { return isLeftLinear(rules) && isRightLinear(rules); }

}  // namespace lconf
