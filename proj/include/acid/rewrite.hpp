// Rewriting modulo AC: rule matching with AC argument partitioning,
// innermost-leftmost normalization, and head rewriting (root redexes,
// including redexes that consume a sub-multiset of a top-level AC sum).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acid/term.hpp"

namespace acid {

struct StepBudgetExceeded : Error {
  using Error::Error;
};

struct RewriteRule {
  Term lhs;
  Term rhs;
};

// An AC-convergent theory: signature plus oriented rules. Rules mention only
// equational symbols; convergence modulo AC is the caller's declaration and
// is probed, not proven, by the test suite.
struct Theory {
  std::string name;
  Signature sig;
  std::vector<RewriteRule> rules;
  long c_e = 0;  // rule-size bound, set by compute_c_e on load

  // throws Error when a rule uses constructors, has a variable lhs, or
  // introduces variables on the right
  void validate() const;
};

// max over rules of |lhs|,|rhs| and max equational arity + 1
long compute_c_e(const Theory& th);

using Substitution = std::map<int, Term>;  // variable id -> term

Term substitute(const Term& t, const Substitution& sub, const Signature& sig);

// All matches of pattern against subject modulo AC, deduplicated modulo
// AC-equality of bindings. Enumeration cost is exponential in the pattern's
// AC arity in the worst case; rule patterns are bounded by c_e.
std::vector<Substitution> match_modulo_ac(const Term& pattern,
                                          const Term& subject,
                                          const Signature& sig,
                                          size_t max_matches = SIZE_MAX);

// One innermost-leftmost rewrite step, or nullopt when t is in normal form.
// At an AC node a rule whose lhs is a sum may consume any sub-multiset of the
// arguments (the AC-extension of the rule).
std::optional<Term> rewrite_step(const Term& t, const Theory& th);

// Repeated rewrite_step to the normal form; throws StepBudgetExceeded after
// step_budget steps.
Term normalize(const Term& t, const Theory& th, long step_budget = 100000);

// Every one-step reduct of t (any position, any rule, any AC match).
TermSet all_rewrite_steps(const Term& t, const Theory& th);

// Root reducts: t AC-equal to an instance of a lhs, or (for AC-headed t)
// a sub-multiset of the top sum AC-equal to an instance, leaving the rest as
// residue. Results are canonical but not further normalized.
TermSet head_rewrite_steps(const Term& t, const Theory& th);

}  // namespace acid
