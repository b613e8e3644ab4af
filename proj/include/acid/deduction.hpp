// Decision procedures for derivability of a ground goal from a finite
// knowledge set: the general problem over the full signature and the
// elementary variant where constructor-headed material is abstracted into
// opaque constants. Both reduce to context matching over the saturated set.
#pragma once

#include <optional>

#include "acid/saturation.hpp"

namespace acid {

struct Decision {
  bool deducible = false;
  std::optional<MatchWitness> witness;  // present for positive decisions
  size_t sat_size = 0;                  // members of the saturated set used
  MatchStats stats;
  bool inputs_normalized = false;  // an input was not already in normal form
};

// Whether goal is derivable from knowledge. Inputs are normalized
// internally; knowledge and goal must be ground. Saturated sets are cached
// per (theory, knowledge) and shared, so repeated queries against the same
// knowledge pay for saturation once.
Decision decide_idp(const TermSet& knowledge, const Term& goal,
                    const Theory& th, long budget = 10000);

// As decide_idp, but every maximal constructor-headed subterm of the inputs
// is first replaced by a fresh opaque private constant (equal subterms map
// to the same constant); witnesses are translated back before returning.
Decision decide_edp(const TermSet& knowledge, const Term& goal,
                    const Theory& th, long budget = 10000);

// Independent bounded forward search used to cross-check the decision
// procedure: closes the knowledge (plus public names and equational
// constants) under single applications of equational symbols for `depth`
// rounds. To stay finite, only results inside a candidate pool are kept:
// the subterm closure of the inputs, the inverses of those subterms, and
// the saturated set. Sound for both answers; completeness is relative to
// the depth and the pool.
bool oracle_derive(const TermSet& knowledge, const Term& goal,
                   const Theory& th, int depth);

// Revalidates a stored witness for decide_edp(knowledge, goal): the context
// may use only equational symbols and public names, every filler must lie in
// the saturated closure of the knowledge (constructor-headed material
// abstracted as in decide_edp), and the filled context must normalize to the
// goal. Propagates SaturationBudgetError.
bool validate_edp_witness(const TermSet& knowledge, const Term& goal,
                          const MatchWitness& w, const Theory& th,
                          long budget = 10000);

}  // namespace acid
