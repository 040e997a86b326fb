#pragma once

#include <utility>
#include <vector>

namespace trsp {

/// min c.x subject to row.terms . x <= row.rhs for every row, x >= 0.
/// Every rhs must be non-negative so the all-slack basis is feasible.
struct LpProblem {
  int n_vars = 0;
  std::vector<double> c;
  struct Row {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
  };
  std::vector<Row> rows;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  long iterations = 0;
};

/// Dense primal simplex with Bland's rule (deterministic, cycle-free).
/// Intended for desk-scale problems; the caller guards sizes.
LpSolution solve_lp(const LpProblem& lp);

}  // namespace trsp
