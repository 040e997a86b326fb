#include "trsp/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trsp {

namespace {
constexpr double kTol = 1e-9;
}

LpSolution solve_lp(const LpProblem& lp) {
  const int n = lp.n_vars;
  const int m = static_cast<int>(lp.rows.size());
  if (static_cast<int>(lp.c.size()) != n) {
    throw std::invalid_argument("objective size does not match variable count");
  }
  for (const auto& row : lp.rows) {
    if (row.rhs < 0) throw std::invalid_argument("simplex expects non-negative rhs");
  }

  // Tableau over structural + slack columns; the last column is the rhs.
  const int width = n + m + 1;
  std::vector<double> tab(std::size_t(m) * width, 0.0);
  auto at = [&](int r, int c) -> double& { return tab[std::size_t(r) * width + c]; };
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    for (const auto& [col, coef] : lp.rows[r].terms) {
      if (col < 0 || col >= n) throw std::invalid_argument("column index out of range");
      at(r, col) += coef;
    }
    at(r, n + r) = 1.0;
    at(r, width - 1) = lp.rows[r].rhs;
    basis[r] = n + r;
  }
  // Reduced-cost row for min: start from c (slacks cost 0, basis is slacks).
  std::vector<double> reduced(width, 0.0);
  for (int cidx = 0; cidx < n; ++cidx) reduced[cidx] = lp.c[cidx];
  double neg_objective = 0.0;

  const long iteration_cap = 200L * (m + n) + 10000;
  long iterations = 0;
  while (true) {
    // Bland: entering = smallest index with a negative reduced cost.
    int enter = -1;
    for (int cidx = 0; cidx < n + m; ++cidx) {
      if (reduced[cidx] < -kTol) {
        enter = cidx;
        break;
      }
    }
    if (enter < 0) break;
    // Ratio test; ties by smallest basic variable index (Bland again).
    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      const double a = at(r, enter);
      if (a > kTol) {
        const double ratio = at(r, width - 1) / a;
        if (leave < 0 || ratio < best_ratio - kTol ||
            (ratio < best_ratio + kTol && basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) {
      throw std::runtime_error("LP is unbounded below");
    }
    // Pivot.
    const double pivot = at(leave, enter);
    for (int cidx = 0; cidx < width; ++cidx) at(leave, cidx) /= pivot;
    for (int r = 0; r < m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (std::abs(f) <= kTol * 0.01) continue;
      for (int cidx = 0; cidx < width; ++cidx) at(r, cidx) -= f * at(leave, cidx);
    }
    const double f = reduced[enter];
    for (int cidx = 0; cidx < width - 1; ++cidx) reduced[cidx] -= f * at(leave, cidx);
    neg_objective -= f * at(leave, width - 1);
    basis[leave] = enter;
    if (++iterations > iteration_cap) {
      throw std::runtime_error("simplex iteration cap exceeded after " +
                               std::to_string(iterations) + " pivots");
    }
  }

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) sol.x[basis[r]] = at(r, width - 1);
  }
  sol.objective = -neg_objective;
  sol.iterations = iterations;
  return sol;
}

}  // namespace trsp
