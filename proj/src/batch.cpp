#include "acid/batch.hpp"

#include <chrono>

namespace acid {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// One query, fault-isolated: engine refusals (divergent saturation, exhausted
// step budget) become kRefused so a single bad query cannot sink the batch.
Verdict one(const BatchQuery& q, const Theory& th, long budget) {
  try {
    return decide_idp(q.knowledge, q.goal, th, budget).deducible ? Verdict::kYes
                                                                 : Verdict::kNo;
  } catch (const Error&) {
    return Verdict::kRefused;
  }
}

}  // namespace

BatchReport run_batch_serial(const std::vector<BatchQuery>& queries,
                             const Theory& th, long budget) {
  BatchReport report;
  report.verdicts.resize(queries.size(), Verdict::kNo);
  Clock::time_point start = Clock::now();
  for (size_t i = 0; i < queries.size(); ++i)
    report.verdicts[i] = one(queries[i], th, budget);
  report.millis = elapsed_ms(start);
  return report;
}

BatchReport run_batch_parallel(const std::vector<BatchQuery>& queries,
                               const Theory& th, long budget) {
  BatchReport report;
  report.verdicts.resize(queries.size(), Verdict::kNo);
  Clock::time_point start = Clock::now();
  // Queries are independent; the saturation cache behind decide_idp is
  // mutex-guarded, and one() never lets an exception escape the loop body,
  // which OpenMP requires.
  const long long n = static_cast<long long>(queries.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i)
    report.verdicts[static_cast<size_t>(i)] =
        one(queries[static_cast<size_t>(i)], th, budget);
  report.millis = elapsed_ms(start);
  return report;
}

}  // namespace acid
