#include "acid/slde.hpp"

#include <cstdlib>
#include <string>

namespace acid {

namespace {

void check_shape(const DiophantineSystem& sys) {
  if (sys.coefficients.size() != sys.targets.size())
    throw Error("Diophantine system has " +
                std::to_string(sys.coefficients.size()) +
                " coefficient rows for " + std::to_string(sys.targets.size()) +
                " targets");
  for (const auto& row : sys.coefficients)
    if (row.size() != sys.vars)
      throw Error("Diophantine row has " + std::to_string(row.size()) +
                  " entries, expected " + std::to_string(sys.vars));
}

}  // namespace

std::optional<std::vector<BigInt>> solve_z(const DiophantineSystem& sys) {
  check_shape(sys);
  const size_t r = sys.rows();
  const size_t q = sys.vars;

  // Work on A*x = t with column operations mirrored into U so that any
  // solution y of the reduced system maps back through x = U*y.
  std::vector<std::vector<BigInt>> a(r, std::vector<BigInt>(q));
  for (size_t j = 0; j < r; ++j)
    for (size_t i = 0; i < q; ++i) a[j][i] = sys.coefficients[j][i];
  std::vector<std::vector<BigInt>> u(q, std::vector<BigInt>(q, 0));
  for (size_t i = 0; i < q; ++i) u[i][i] = 1;

  auto col_swap = [&](size_t x, size_t y) {
    if (x == y) return;
    for (size_t j = 0; j < r; ++j) std::swap(a[j][x], a[j][y]);
    for (size_t i = 0; i < q; ++i) std::swap(u[i][x], u[i][y]);
  };
  auto col_axpy = [&](size_t dst, size_t src, const BigInt& f) {
    if (f == 0) return;
    for (size_t j = 0; j < r; ++j) a[j][dst] += f * a[j][src];
    for (size_t i = 0; i < q; ++i) u[i][dst] += f * u[i][src];
  };

  // Forward pass: bring A into column echelon form. After handling a row,
  // all of its entries right of the pivot column are zero and stay zero.
  std::vector<long> pivot_of_row(r, -1);
  size_t pc = 0;  // next unused pivot column
  for (size_t row = 0; row < r && pc < q; ++row) {
    size_t nz = q;
    for (size_t c = pc; c < q; ++c)
      if (a[row][c] != 0) {
        nz = c;
        break;
      }
    if (nz == q) continue;  // row has no pivot; checked in back substitution
    col_swap(pc, nz);
    for (size_t c = pc + 1; c < q; ++c) {
      // Euclidean gcd of a[row][pc] and a[row][c] via column operations.
      while (a[row][c] != 0) {
        BigInt f = a[row][c] / a[row][pc];
        col_axpy(c, pc, -f);
        if (a[row][c] != 0) col_swap(pc, c);
      }
    }
    pivot_of_row[row] = static_cast<long>(pc);
    ++pc;
  }

  // Back substitution: rows are triangular with respect to pivot columns;
  // every nonzero entry of a row sits in its own or an earlier pivot column.
  std::vector<BigInt> y(q, 0);
  for (size_t row = 0; row < r; ++row) {
    BigInt rhs = sys.targets[row];
    for (size_t c = 0; c < q; ++c)
      if (pivot_of_row[row] != static_cast<long>(c)) rhs -= a[row][c] * y[c];
    if (pivot_of_row[row] < 0) {
      if (rhs != 0) return std::nullopt;
      continue;
    }
    const BigInt& piv = a[row][static_cast<size_t>(pivot_of_row[row])];
    if (rhs % piv != 0) return std::nullopt;
    y[static_cast<size_t>(pivot_of_row[row])] = rhs / piv;
  }

  std::vector<BigInt> x(q, 0);
  for (size_t i = 0; i < q; ++i)
    for (size_t c = 0; c < q; ++c) x[i] += u[i][c] * y[c];
  return x;
}

std::optional<std::vector<long>> solve_n_bounded(const DiophantineSystem& sys,
                                                 long bound) {
  check_shape(sys);
  if (bound < 0) throw Error("bounded solver needs a nonnegative bound");
  for (const auto& row : sys.coefficients)
    for (long e : row)
      if (e < 0)
        throw Error("bounded solver requires nonnegative coefficients");

  // With nonnegative coefficients and variables, partial sums only grow, so
  // any overshoot of a target prunes the whole subtree.
  std::vector<long> remaining = sys.targets;
  for (long t : remaining)
    if (t < 0) return std::nullopt;
  std::vector<long> chosen(sys.vars, 0);

  auto dfs = [&](auto&& self, size_t var) -> bool {
    if (var == sys.vars) {
      for (long t : remaining)
        if (t != 0) return false;
      return true;
    }
    for (long v = 0; v <= bound; ++v) {
      bool feasible = true;
      if (v > 0) {
        for (size_t j = 0; j < sys.rows(); ++j) {
          remaining[j] -= sys.coefficients[j][var];
          if (remaining[j] < 0) feasible = false;
        }
        if (!feasible) {
          for (size_t j = 0; j < sys.rows(); ++j)
            remaining[j] += sys.coefficients[j][var];
          break;  // larger v only overshoots further
        }
      }
      chosen[var] = v;
      if (self(self, var + 1)) return true;
    }
    // Undo all increments applied at this level.
    for (size_t j = 0; j < sys.rows(); ++j)
      remaining[j] += sys.coefficients[j][var] * chosen[var];
    chosen[var] = 0;
    return false;
  };
  if (dfs(dfs, 0)) return chosen;
  return std::nullopt;
}

bool slde_satisfies(const DiophantineSystem& sys,
                    const std::vector<BigInt>& solution) {
  check_shape(sys);
  if (solution.size() != sys.vars) return false;
  for (size_t j = 0; j < sys.rows(); ++j) {
    BigInt acc = 0;
    for (size_t i = 0; i < sys.vars; ++i)
      acc += BigInt(sys.coefficients[j][i]) * solution[i];
    if (acc != sys.targets[j]) return false;
  }
  return true;
}

}  // namespace acid
