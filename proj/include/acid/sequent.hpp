// Cut-free sequent proof search for the two-layer intruder model: the
// equational layer is discharged by elementary deduction at the leaves, and
// the constructor layer (pairing, symmetric encryption, signatures, blind
// signatures) is handled by dedicated left/right rules plus an analytic cut
// restricted to equationally exposed alien subterms. Search is memoized over
// canonical sequents; the reachable term space is the subterm closure of the
// root sequent extended with the unblinded signatures sign(N,K) obtainable
// from any sign(blind(N,R),K) it contains.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acid/deduction.hpp"

namespace acid {

// The candidate term space grew past the configured cap.
struct SearchSpaceError : Error {
  using Error::Error;
};

// Constructor symbols the sequent rules act on, resolved by conventional
// name and arity: pair/2, enc/2, sign/2, blind/2, pub/1. Absent symbols
// leave their role at -1 and the corresponding rules never fire.
struct ConstructorRoles {
  int pair = -1;
  int enc = -1;
  int sign = -1;
  int blind = -1;
  int pub = -1;

  static ConstructorRoles resolve(const Signature& sig);
};

// Hypotheses derive the goal. Terms are kept normalized and canonical, so
// set membership and equality are modulo AC.
struct Sequent {
  TermSet hypotheses;
  Term goal;
};

bool operator==(const Sequent& a, const Sequent& b);

// One proof step. rule is one of: id, p_L, p_R, e_L, e_R, sign_L, sign_R,
// blind_L1, blind_L2, blind_R, acut. Left rules and acut carry the principal
// term; id leaves carry the elementary-deduction witness.
struct ProofNode {
  std::string rule;
  Sequent conclusion;
  std::vector<ProofNode> premises;
  std::optional<Term> principal;
  std::optional<MatchWitness> witness;
};

// Proof search. Inputs are normalized internally and must be ground. Rules
// are tried in a fixed order: first the invertible left rules (p_L, sign_L),
// then the branching left rules (e_L, blind_L1, blind_L2, acut), then the
// right rule matching the goal's head constructor, and finally the
// elementary-deduction axiom. Failures are cached only when they do not
// depend on a cycle through an enclosing sequent, so memoization never
// masks a proof reachable along another path. Throws SearchSpaceError when
// the candidate term space exceeds max_candidates, and propagates
// SaturationBudgetError from the elementary layer.
std::optional<ProofNode> prove(const Sequent& s, const Theory& th,
                               size_t max_candidates = 4096,
                               long budget = 10000);

// Revalidates a proof: every node must instantiate its rule schema exactly
// (including the side condition that sign_L's verification key matches a
// pub hypothesis modulo AC), and every id leaf's stored witness must check
// against a fresh saturation of that leaf's hypotheses. Returns false
// instead of throwing when the elementary layer exceeds its budget.
bool check_proof(const ProofNode& p, const Theory& th, long budget = 10000);

// JSON round trip. Serialization renumbers witness holes into left-to-right
// order so the printed contexts re-parse unambiguously; proof_from_json
// interns unknown names as private.
std::string proof_to_json(const ProofNode& p, const Signature& sig);
ProofNode proof_from_json(const std::string& text, Signature& sig);

}  // namespace acid
