#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "acid/slde.hpp"
#include "oracles.hpp"

using namespace acid;
using testing::Rng;

namespace {

DiophantineSystem make(size_t vars, std::vector<std::vector<long>> coef,
                       std::vector<long> targets) {
  DiophantineSystem s;
  s.vars = vars;
  s.coefficients = std::move(coef);
  s.targets = std::move(targets);
  return s;
}

std::vector<BigInt> widen(const std::vector<long>& xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST_CASE("integer solver on small pinned systems") {
  auto gcd_ok = make(2, {{2, 3}}, {1});
  auto sol = solve_z(gcd_ok);
  REQUIRE(sol.has_value());
  CHECK(slde_satisfies(gcd_ok, *sol));

  auto parity = make(1, {{2}}, {1});
  CHECK_FALSE(solve_z(parity).has_value());

  auto parity2 = make(2, {{2, 2}}, {3});
  CHECK_FALSE(solve_z(parity2).has_value());

  auto pinned_zero = make(1, {{1}}, {0});
  auto z = solve_z(pinned_zero);
  REQUIRE(z.has_value());
  CHECK((*z)[0] == 0);

  // No equations at all: the all-zero tuple.
  auto empty = make(3, {}, {});
  auto e = solve_z(empty);
  REQUIRE(e.has_value());
  CHECK(*e == std::vector<BigInt>{0, 0, 0});

  // Inconsistent pair of equations.
  auto incons = make(2, {{1, 1}, {1, 1}}, {1, 2});
  CHECK_FALSE(solve_z(incons).has_value());

  // Requires combining rows: x + y = 3, x - y = 1.
  auto pair = make(2, {{1, 1}, {1, -1}}, {3, 1});
  auto p = solve_z(pair);
  REQUIRE(p.has_value());
  CHECK(slde_satisfies(pair, *p));

  // Zero-row with nonzero target after elimination: x+y=1 doubled to 2x+2y=3.
  auto dep = make(2, {{1, 1}, {2, 2}}, {1, 3});
  CHECK_FALSE(solve_z(dep).has_value());
}

TEST_CASE("bounded natural solver") {
  auto two = make(2, {{1, 1}}, {2});
  auto sol = solve_n_bounded(two, 2);
  REQUIRE(sol.has_value());
  CHECK((*sol)[0] + (*sol)[1] == 2);
  for (long v : *sol) {
    CHECK(v >= 0);
    CHECK(v <= 2);
  }

  // Solvable over the integers but not inside the box.
  auto out_of_box = make(2, {{1, 1}}, {5});
  CHECK_FALSE(solve_n_bounded(out_of_box, 2).has_value());

  // Negative coefficients are outside this solver's contract.
  auto negative = make(1, {{-1}}, {1});
  CHECK_THROWS_AS((void)solve_n_bounded(negative, 3), Error);

  // Negative target is trivially unreachable with nonnegative data.
  auto neg_target = make(1, {{1}}, {-2});
  CHECK_FALSE(solve_n_bounded(neg_target, 3).has_value());

  auto empty = make(0, {{}, {}}, {0, 0});
  CHECK(solve_n_bounded(empty, 1).has_value());
}

TEST_CASE("malformed systems are rejected") {
  auto ragged = make(2, {{1}}, {1});
  CHECK_THROWS_AS((void)solve_z(ragged), Error);
  auto missing_target = make(1, {{1}, {2}}, {1});
  CHECK_THROWS_AS((void)solve_z(missing_target), Error);
}

TEST_CASE("integer solver agrees with box search on random systems") {
  Rng rng(20240811);
  int solved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    size_t vars = static_cast<size_t>(rng.uniform(1, 4));
    size_t rows = static_cast<size_t>(rng.uniform(1, 3));
    DiophantineSystem sys;
    sys.vars = vars;
    for (size_t j = 0; j < rows; ++j) {
      std::vector<long> row;
      for (size_t i = 0; i < vars; ++i) row.push_back(rng.uniform(-6, 6));
      sys.coefficients.push_back(std::move(row));
      sys.targets.push_back(rng.uniform(-10, 10));
    }
    CAPTURE(trial);
    auto mine = solve_z(sys);
    auto box = testing::brute_box_solve(sys, -10, 10);
    if (mine) {
      ++solved;
      CHECK(slde_satisfies(sys, *mine));
    }
    if (box) {
      REQUIRE(mine.has_value());  // a box witness implies integer solvability
      CHECK(slde_satisfies(sys, widen(*box)));
    }
  }
  CHECK(solved > 50);  // the sample must exercise both outcomes
}

TEST_CASE("bounded solver agrees with box search on random systems") {
  Rng rng(777002);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    size_t vars = static_cast<size_t>(rng.uniform(1, 4));
    size_t rows = static_cast<size_t>(rng.uniform(1, 3));
    DiophantineSystem sys;
    sys.vars = vars;
    for (size_t j = 0; j < rows; ++j) {
      std::vector<long> row;
      for (size_t i = 0; i < vars; ++i) row.push_back(rng.uniform(0, 5));
      sys.coefficients.push_back(std::move(row));
      sys.targets.push_back(rng.uniform(0, 10));
    }
    CAPTURE(trial);
    auto mine = solve_n_bounded(sys, 4);
    auto box = testing::brute_box_solve(sys, 0, 4);
    CHECK(mine.has_value() == box.has_value());
    if (mine) {
      ++solved;
      CHECK(slde_satisfies(sys, widen(*mine)));
      for (long v : *mine) {
        CHECK(v >= 0);
        CHECK(v <= 4);
      }
    }
  }
  CHECK(solved > 20);
}
