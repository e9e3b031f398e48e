#include "classthresh/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "classthresh/errors.hpp"

namespace classthresh {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
  std::size_t m = 0, ncols = 0;
  std::vector<std::vector<double>> t;  // m+1 rows; last row = reduced costs
  std::vector<std::size_t> basis;      // basic column per row
  int iterations = 0;

  double& rhs(std::size_t i) { return t[i][ncols]; }

  void pivot(std::size_t row, std::size_t col) {
    const double piv = t[row][col];
    for (std::size_t j = 0; j <= ncols; ++j) t[row][j] /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) t[i][j] -= f * t[row][j];
      t[i][col] = 0.0;
    }
    basis[row] = col;
    ++iterations;
  }

  // Bland's rule; `allowed` masks columns that may enter.
  // Returns kOptimal when no reduced cost is negative.
  LpStatus iterate(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (allowed[j] && t[m][j] < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter == ncols) return LpStatus::kOptimal;

      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > kEps) {
          const double ratio = rhs(i) / t[i][enter];
          if (ratio < best - 1e-12 ||
              (ratio < best + 1e-12 && (leave == m || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return LpStatus::kUnbounded;
      pivot(leave, enter);
      if (iterations > 10000) {
        throw ValidationError("simplex: iteration limit exceeded");
      }
    }
  }
};

}  // namespace

LpSolution solve_lp(const std::vector<std::vector<double>>& A,
                    const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw ValidationError("solve_lp: A/b size mismatch");
  for (const auto& row : A) {
    if (row.size() != n) throw ValidationError("solve_lp: A/c size mismatch");
  }

  // Columns: n structural, m slacks, then one artificial per negative-RHS row.
  std::vector<std::size_t> art_col(m, 0);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) ++n_art;
  }

  Tableau tab;
  tab.m = m;
  tab.ncols = n + m + n_art;
  tab.t.assign(m + 1, std::vector<double>(tab.ncols + 1, 0.0));
  tab.basis.assign(m, 0);

  std::size_t next_art = n + m;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = (b[i] < 0.0) ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = sign * A[i][j];
    tab.t[i][n + i] = sign;  // slack
    tab.rhs(i) = sign * b[i];
    if (sign < 0.0) {
      art_col[i] = next_art;
      tab.t[i][next_art] = 1.0;
      tab.basis[i] = next_art;
      ++next_art;
    } else {
      tab.basis[i] = n + i;
    }
  }

  std::vector<bool> allowed(tab.ncols, true);

  if (n_art > 0) {
    // Phase 1: minimize the artificial mass.
    for (std::size_t j = n + m; j < tab.ncols; ++j) tab.t[m][j] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis[i] >= n + m) {
        for (std::size_t j = 0; j <= tab.ncols; ++j) {
          tab.t[m][j] -= tab.t[i][j];
        }
      }
    }
    const LpStatus s1 = tab.iterate(allowed);
    if (s1 == LpStatus::kUnbounded) {
      throw ValidationError("simplex: phase 1 unbounded");
    }
    const double art_mass = -tab.t[m][tab.ncols];
    if (art_mass > 1e-7) {
      LpSolution sol;
      sol.status = LpStatus::kInfeasible;
      sol.iterations = tab.iterations;
      return sol;
    }
    // Drive leftover artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis[i] >= n + m) {
        for (std::size_t j = 0; j < n + m; ++j) {
          if (std::fabs(tab.t[i][j]) > kEps) {
            tab.pivot(i, j);
            break;
          }
        }
      }
    }
  }

  // Artificials may no longer enter.
  for (std::size_t j = n + m; j < tab.ncols; ++j) allowed[j] = false;

  // Phase 2 cost row: structural costs reduced by the current basis.
  for (std::size_t j = 0; j <= tab.ncols; ++j) tab.t[m][j] = 0.0;
  for (std::size_t j = 0; j < n; ++j) tab.t[m][j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bj = tab.basis[i];
    const double cost = (bj < n) ? c[bj] : 0.0;
    if (cost != 0.0) {
      for (std::size_t j = 0; j <= tab.ncols; ++j) {
        tab.t[m][j] -= cost * tab.t[i][j];
      }
    }
  }

  const LpStatus s2 = tab.iterate(allowed);
  LpSolution sol;
  sol.iterations = tab.iterations;
  if (s2 == LpStatus::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] < n) sol.x[tab.basis[i]] = tab.rhs(i);
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += c[j] * sol.x[j];
  return sol;
}

}  // namespace classthresh
