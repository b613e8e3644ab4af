// Exact solvers for systems of linear Diophantine equations: a polynomial
// integer solver (column Hermite reduction) and a bounded natural-number
// solver for AC symbols that come without an inverse.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

#include "acid/term.hpp"

namespace acid {

using BigInt = boost::multiprecision::cpp_int;

// coefficients[j][i] is the multiplicity of base term j in candidate i;
// inverse-headed occurrences contribute negative counts.
struct DiophantineSystem {
  size_t vars = 0;
  std::vector<std::vector<long>> coefficients;  // one row per equation
  std::vector<long> targets;                    // one entry per equation

  size_t rows() const { return targets.size(); }
};

// Some integer solution of coefficients*x = targets, or nullopt when none
// exists. Column-style Hermite reduction via repeated gcd elimination with
// exact arbitrary-precision arithmetic; intermediate values can outgrow any
// fixed-width integer even on small inputs.
std::optional<std::vector<BigInt>> solve_z(const DiophantineSystem& sys);

// Some solution over {0,...,bound}^vars, or nullopt when none exists in that
// box. Exhaustive search with sum pruning, exponential in vars; valid only
// for systems with nonnegative coefficients (throws Error otherwise).
std::optional<std::vector<long>> solve_n_bounded(const DiophantineSystem& sys,
                                                 long bound);

// Exact substitution check, usable with either solver's output.
bool slde_satisfies(const DiophantineSystem& sys,
                    const std::vector<BigInt>& solution);

}  // namespace acid
