// Closure of a knowledge set under the equational layer: composition of
// already-known pieces, inverses, normal forms, and the results of head
// rewrites over small sums. Every added term carries a trace entry that acts
// as a derivation certificate.
#pragma once

#include <string>
#include <vector>

#include "acid/acmatch.hpp"
#include "acid/rewrite.hpp"

namespace acid {

struct TraceEntry {
  Term term;                   // the element added (canonical normal form)
  std::string rule;            // seed | neutral | inverse | compose | rewrite
  Term raw;                    // the construction the element came from
  std::vector<Term> premises;  // earlier elements used by the construction
};

struct SaturatedSet {
  TermSet terms;
  TermSet origin;  // the normalized input knowledge
  std::string theory_name;
  std::vector<TraceEntry> trace;  // in addition order
  bool complete = true;           // false when a budget cut the fixpoint short
};

// Thrown when the closure would exceed its budget; carries the partial set.
struct SaturationBudgetError : Error {
  SaturationBudgetError(const std::string& msg, SaturatedSet partial_set)
      : Error(msg), partial(std::move(partial_set)) {}
  SaturatedSet partial;
};

// Least fixpoint of the closure rules, starting from the normalized input
// plus the neutral elements. budget bounds the number of added terms.
SaturatedSet saturate(const TermSet& gamma, const Theory& th,
                      long budget = 10000);
// The general engine and the specialized Abelian-group closure; saturate
// dispatches between them. Both must agree whenever ag_shaped holds.
SaturatedSet saturate_generic(const TermSet& gamma, const Theory& th,
                              long budget);
SaturatedSet saturate_ag(const TermSet& gamma, const Theory& th, long budget);
// True when the theory's rewrite rules are exactly the five Abelian-group
// rules over a single AC symbol with inverse and neutral.
bool ag_shaped(const Theory& th);

struct ConditionViolation {
  int condition = 0;   // which closure condition failed (1..6)
  std::string detail;
  Term witness;
};

struct VerifyReport {
  std::vector<ConditionViolation> violations;
  long samples_run = 0;
  std::vector<std::string> assumptions;  // finitizations the check relies on
  bool ok() const { return violations.empty(); }
};

// Exhaustive checks for containment, composition, normal forms, inverses and
// certificate replay; the head-rewrite stability condition is sampled with
// `samples` random small contexts filled with sums over the set.
VerifyReport verify_conditions(const SaturatedSet& sat, const Theory& th,
                               long samples, uint64_t seed = 1);

// Validates every trace entry against the terms added before it. On failure
// returns false and, when why is non-null, stores a description.
bool replay_trace(const SaturatedSet& sat, const Theory& th,
                  std::string* why = nullptr);

}  // namespace acid
