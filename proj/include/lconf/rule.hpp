#pragma once

#include "lconf/term.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lconf {

/// Constrained rewrite rule ℓ → r [φ].
struct Rule {
  Term lhs;
  Term rhs;
  Term constraint;
  std::string label;
  bool calculation = false;

  /// Var(ℓ) ∪ Var(r) ∪ Var(φ)
  VarSet allVars() const;
  /// Var(φ) ∪ (Var(r) \ Var(ℓ))
  VarSet logicalVars() const;
  /// Var(r) \ (Var(ℓ) ∪ Var(φ))
  VarSet extraVars() const;

  std::string toString() const;
};

using RuleRef = std::shared_ptr<const Rule>;

/// Consistently renames every variable of ρ to a fresh one. The result
/// shares no variable with `avoid` (nor with any earlier fresh name).
Rule renameApart(const Rule& rule, const VarSet& avoid, const NameSupply& names);
/// Renaming witness for the variant check, if any.
std::optional<Substitution> variantRenaming(const Rule& a, const Rule& b);
bool isVariant(const Rule& a, const Rule& b);

bool isLeftLinear(const std::vector<Rule>& rules);
bool isRightLinear(const std::vector<Rule>& rules);
/// Left- and right-linear.
bool isLinearSystem(const std::vector<Rule>& rules);

}  // namespace lconf
