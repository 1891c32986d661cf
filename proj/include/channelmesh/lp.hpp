#pragma once
// Dense two-phase simplex for the small linear programs produced by the
// rebalancing planners. Minimization form:
//
//   min  c . x
//   s.t. row_k . x  (<= | >= | =)  rhs_k     for every row
//        lower_j <= x_j <= upper_j           (+-inf allowed)
//
// Solves in doubles. Feasibility uses a tolerance scaled to the input
// magnitudes (base 1e-9). Bland's rule keeps the pivot sequence finite
// and deterministic, so identical inputs give identical solutions.

#include <limits>
#include <vector>

namespace channelmesh {

constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

enum class LpSense : char {
  LessEqual = '<',
  GreaterEqual = '>',
  Equal = '=',
};

struct LpRow {
  std::vector<double> coeffs;
  LpSense sense = LpSense::LessEqual;
  double rhs = 0.0;
};

struct LpProblem {
  // One cost entry per variable; minimized.
  std::vector<double> objective;
  std::vector<LpRow> rows;
  // Optional; resized to the variable count with -inf/+inf when empty.
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }
  void add_row(std::vector<double> coeffs, LpSense sense, double rhs);
};

enum class LpStatus {
  Optimal,
  Infeasible,
  Unbounded,
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
};

LpSolution solve_lp(const LpProblem& problem);

}  // namespace channelmesh
