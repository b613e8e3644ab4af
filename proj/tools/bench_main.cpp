// Benchmark: the serial deduction runner against the OpenMP one on the same
// random workload. Verdicts must agree; timing differences are the point.
// On a single-core host the two are expected to run at parity.
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "acid/fuzz.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  std::string preset = "ag";
  int count = 400;
  std::uint64_t seed = 7;
  long budget = 10000;
  int repeats = 3;

  CLI::App app{"serial vs parallel deduction benchmark"};
  app.add_option("--preset", preset, "bundled theory: ag, pure-ac, ag+blind");
  app.add_option("--count", count, "queries per run");
  app.add_option("--seed", seed, "workload seed");
  app.add_option("--budget", budget, "work budget per query");
  app.add_option("--repeats", repeats, "timed runs per mode (best is kept)");
  CLI11_PARSE(app, argc, argv);

  acid::Theory th;
  std::vector<acid::BatchQuery> queries =
      acid::random_queries(preset, count, seed, th);

#ifdef _OPENMP
  std::cout << "OpenMP enabled, max threads: " << omp_get_max_threads()
            << "\n";
#else
  std::cout << "OpenMP disabled; parallel runner degenerates to serial\n";
#endif
  std::cout << "workload: " << queries.size() << " queries, preset " << preset
            << ", seed " << seed << "\n\n";

  // Warm-up pass so saturation-cache effects hit both modes equally.
  acid::BatchReport serial = acid::run_batch_serial(queries, th, budget);

  double best_serial = -1, best_parallel = -1;
  acid::BatchReport parallel;
  for (int r = 0; r < repeats; ++r) {
    acid::BatchReport s = acid::run_batch_serial(queries, th, budget);
    if (best_serial < 0 || s.millis < best_serial) best_serial = s.millis;
    acid::BatchReport p = acid::run_batch_parallel(queries, th, budget);
    if (best_parallel < 0 || p.millis < best_parallel) best_parallel = p.millis;
    parallel = std::move(p);
  }

  int yes = 0, no = 0, refused = 0;
  for (acid::Verdict v : serial.verdicts) {
    if (v == acid::Verdict::kYes) ++yes;
    if (v == acid::Verdict::kNo) ++no;
    if (v == acid::Verdict::kRefused) ++refused;
  }
  std::cout << "verdicts: " << yes << " derivable, " << no
            << " not derivable, " << refused << " refused\n";

  bool same = serial.verdicts == parallel.verdicts;
  std::cout << std::fixed << std::setprecision(2);
  std::cout << "serial:   " << std::setw(10) << best_serial << " ms\n";
  std::cout << "parallel: " << std::setw(10) << best_parallel << " ms\n";
  std::cout << "speedup:  " << std::setw(10)
            << (best_parallel > 0 ? best_serial / best_parallel : 0.0)
            << "x\n";
  std::cout << "verdict agreement: " << (same ? "yes" : "NO -- BUG") << "\n";
  return same ? 0 : 1;
}
