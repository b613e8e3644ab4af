// Decides whether a ground normal-form term can be written as a context over
// the equational-symbol fragment (plus public names) whose holes are filled
// with members of a given term set, working modulo AC. Sum nodes are handled
// by abstracting them into linear Diophantine systems over their distinct
// base terms; deeper sums are solved first so their results can serve as
// candidate summands for the enclosing ones.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "acid/rewrite.hpp"
#include "acid/slde.hpp"

namespace acid {

// A sum t = b_1*c_1 + ... + b_r*c_r seen through integer glasses: distinct
// base terms with signed multiplicities. A summand headed by the inverse of
// the AC symbol counts negatively toward the base under the inverse, except
// when that base is inverse-headed or a sum of the same AC symbol (then the
// raw summand is kept whole, since such a base is not an independent atom of
// the abstraction). Neutral-element summands contribute nothing.
struct SumDecomposition {
  int ac = -1;                             // the AC symbol
  std::vector<std::pair<Term, long>> parts;  // base -> multiplicity, sorted

  long count(const Term& base) const;
};

SumDecomposition decompose_sum(const Term& t, int ac, const Signature& sig);

// Candidate selection rule: a candidate can contribute to a target sum only
// if every one of its base terms occurs among the target's bases.
bool candidate_selectable(const SumDecomposition& target,
                          const SumDecomposition& cand);

// One equation per target base; one variable per candidate, in input order.
// Candidates that fail the selection rule contribute no variable.
DiophantineSystem build_slde(const SumDecomposition& target,
                             const std::vector<SumDecomposition>& candidates);

// Division-module matching: the remainder x with t_i (+) x = m, where the
// signed base multiset of t_i must embed into m's with matching signs. An
// empty remainder yields the neutral element; without a declared neutral the
// match is rejected.
std::optional<Term> do_acm_match(const Term& t_i, const Term& m, int ac,
                                 const Signature& sig);

// A successful match: filling the context's holes with the fillers (by hole
// index) reproduces the matched term modulo AC.
struct MatchWitness {
  Context context;
  std::vector<Term> fillers;
};

struct MatchStats {
  long slde_count = 0;      // sum positions abstracted into linear systems
  long occurrences = 0;     // subterm occurrences deleted during marking
  bool witness_exact = true;  // false: witness valid modulo rewriting only
};

// m must be ground. Every filler of a returned witness is a member of sat.
std::optional<MatchWitness> context_match(const Term& m, const TermSet& sat,
                                          const Theory& th,
                                          MatchStats* stats = nullptr);

// Renumbers the witness's holes into left-to-right order and permutes the
// fillers to match, so a printed context (every hole renders as "_") re-parses
// into the same witness. The index map is monotone in encounter order, so AC
// argument sorting is unaffected.
MatchWitness renumber_holes(const MatchWitness& w, const Signature& sig);

}  // namespace acid
