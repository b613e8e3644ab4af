// Bulk deduction: many (knowledge, goal) queries against one theory, with a
// serial reference runner and an OpenMP runner that must produce identical
// verdicts. The two exist so the parallel path can be validated against the
// serial one and benchmarked on the same workload.
#pragma once

#include <vector>

#include "acid/deduction.hpp"

namespace acid {

enum class Verdict : int { kNo = 0, kYes = 1, kRefused = 2 };

struct BatchQuery {
  TermSet knowledge;
  Term goal;
};

struct BatchReport {
  std::vector<Verdict> verdicts;  // one per query, in input order
  double millis = 0;
};

// Serial reference runner. A query that raises an engine error (saturation
// divergence, step budget) reports kRefused instead of aborting the batch.
BatchReport run_batch_serial(const std::vector<BatchQuery>& queries,
                             const Theory& th, long budget = 10000);

// OpenMP runner with the same contract; degenerates to the serial loop when
// built without OpenMP.
BatchReport run_batch_parallel(const std::vector<BatchQuery>& queries,
                               const Theory& th, long budget = 10000);

}  // namespace acid
