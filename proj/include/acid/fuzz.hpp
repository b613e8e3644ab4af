// Randomized cross-checking of the engine against independent reference
// procedures: the deduction decision against bounded forward search, the
// integer linear solver against box enumeration, and context matching against
// partition enumeration. Disagreements are written out as replayable files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acid/batch.hpp"

namespace acid {

struct FuzzConfig {
  std::string preset = "ag";  // theory family to draw queries from
  uint64_t seed = 1;
  int cases = 100;       // deduction queries; the other checks scale off this
  int oracle_depth = 4;  // rounds of the forward-search reference
  long budget = 10000;
  std::string artifact_dir;  // where replay files go; empty disables them
};

struct FuzzReport {
  int deduction_cases = 0;
  int deduction_mismatches = 0;
  int deduction_refusals = 0;  // engine declined to answer; not a failure
  int slde_cases = 0;
  int slde_mismatches = 0;
  int match_cases = 0;
  int match_mismatches = 0;
  std::vector<std::string> artifacts;  // replay files written

  bool ok() const {
    return deduction_mismatches == 0 && slde_mismatches == 0 &&
           match_mismatches == 0;
  }
};

// Runs all three cross-checks over randomly drawn instances. Deterministic in
// the config: the same config yields the same queries, verdicts, and report.
FuzzReport run_fuzz(const FuzzConfig& cfg);

// The deduction workload run_fuzz draws, exposed so the benchmark measures
// the same distribution. Replaces th with the preset theory extended by the
// names the queries mention. Deterministic in (preset, count, seed).
std::vector<BatchQuery> random_queries(const std::string& preset, int count,
                                       uint64_t seed, Theory& th);

}  // namespace acid
