#include "channelmesh/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "channelmesh/types.hpp"

namespace channelmesh {

void LpProblem::add_row(std::vector<double> coeffs, LpSense sense,
                        double rhs) {
  if (coeffs.size() != num_vars()) {
    throw invalid_argument_error("LP row width does not match variable count");
  }
  rows.push_back({std::move(coeffs), sense, rhs});
}

namespace {

// Standard-form image of one original variable.
struct VarMap {
  // x = offset + sign * x_std[col]  (+ optionally - x_std[neg_col])
  std::size_t col = 0;
  std::size_t neg_col = SIZE_MAX;  // set for free variables (x = p - n)
  double offset = 0.0;
  double sign = 1.0;
};

struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // structural + slack + artificial
  std::vector<double> a;  // rows x cols
  std::vector<double> b;  // rhs per row
  std::vector<std::size_t> basis;
  std::vector<bool> active;  // redundant rows get switched off

  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

void pivot(Tableau& t, std::size_t prow, std::size_t pcol) {
  const double p = t.at(prow, pcol);
  for (std::size_t c = 0; c < t.cols; ++c) t.at(prow, c) /= p;
  t.b[prow] /= p;
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (r == prow || !t.active[r]) continue;
    const double f = t.at(r, pcol);
    if (f == 0.0) continue;
    for (std::size_t c = 0; c < t.cols; ++c) {
      t.at(r, c) -= f * t.at(prow, c);
    }
    t.b[r] -= f * t.b[prow];
  }
  t.basis[prow] = pcol;
}

// Runs Bland-rule simplex for the given cost vector over allowed
// columns. Returns false when unbounded.
bool run_simplex(Tableau& t, const std::vector<double>& cost,
                 const std::vector<bool>& allowed, double eps) {
  const std::size_t n = t.cols;
  while (true) {
    // Reduced costs from scratch each iteration: slower but immune to
    // drift, and the planner problems are small.
    std::size_t entering = SIZE_MAX;
    for (std::size_t j = 0; j < n; ++j) {
      if (!allowed[j]) continue;
      bool basic = false;
      for (std::size_t r = 0; r < t.rows; ++r) {
        if (t.active[r] && t.basis[r] == j) {
          basic = true;
          break;
        }
      }
      if (basic) continue;
      double reduced = cost[j];
      for (std::size_t r = 0; r < t.rows; ++r) {
        if (!t.active[r]) continue;
        reduced -= cost[t.basis[r]] * t.at(r, j);
      }
      if (reduced < -eps) {
        entering = j;
        break;  // Bland: first improving index
      }
    }
    if (entering == SIZE_MAX) return true;  // optimal

    std::size_t leaving = SIZE_MAX;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < t.rows; ++r) {
      if (!t.active[r]) continue;
      const double col = t.at(r, entering);
      if (col <= eps) continue;
      const double ratio = t.b[r] / col;
      if (leaving == SIZE_MAX || ratio < best_ratio - eps ||
          (std::abs(ratio - best_ratio) <= eps &&
           t.basis[r] < t.basis[leaving])) {
        leaving = r;
        best_ratio = ratio;
      }
    }
    if (leaving == SIZE_MAX) return false;  // unbounded
    pivot(t, leaving, entering);
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  const std::size_t n = problem.num_vars();
  std::vector<double> lower = problem.lower;
  std::vector<double> upper = problem.upper;
  lower.resize(n, -kLpInfinity);
  upper.resize(n, kLpInfinity);

  for (std::size_t j = 0; j < n; ++j) {
    if (lower[j] > upper[j]) {
      return {LpStatus::Infeasible, {}, 0.0};
    }
  }

  // Magnitude-aware tolerance.
  double scale = 1.0;
  for (const auto& row : problem.rows) {
    for (double v : row.coeffs) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, std::abs(row.rhs));
  }
  const double eps = 1e-9 * scale;

  // Substitute variables so every standard column is >= 0.
  std::vector<VarMap> map(n);
  std::size_t next_col = 0;
  std::vector<LpRow> extra_rows;  // upper bounds turned into rows
  for (std::size_t j = 0; j < n; ++j) {
    const bool lo_fin = std::isfinite(lower[j]);
    const bool hi_fin = std::isfinite(upper[j]);
    if (lo_fin) {
      map[j] = {next_col++, SIZE_MAX, lower[j], 1.0};
      if (hi_fin) {
        LpRow r;
        r.coeffs.assign(n, 0.0);
        r.coeffs[j] = 1.0;
        r.sense = LpSense::LessEqual;
        r.rhs = upper[j];
        extra_rows.push_back(std::move(r));
      }
    } else if (hi_fin) {
      // x = upper - x'
      map[j] = {next_col++, SIZE_MAX, upper[j], -1.0};
    } else {
      map[j] = {next_col, next_col + 1, 0.0, 1.0};
      next_col += 2;
    }
  }
  const std::size_t structural = next_col;

  std::vector<LpRow> all_rows = problem.rows;
  all_rows.insert(all_rows.end(), extra_rows.begin(), extra_rows.end());
  const std::size_t m = all_rows.size();

  // Each row gets a slack/surplus; artificials are added as needed.
  Tableau t;
  t.rows = m;
  t.cols = structural + m;  // artificials appended below
  std::vector<double> rhs(m, 0.0);
  std::vector<int> slack_sign(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    double acc = all_rows[r].rhs;
    for (std::size_t j = 0; j < n; ++j) {
      // Shift offsets into the RHS.
      acc -= all_rows[r].coeffs[j] * map[j].offset;
    }
    rhs[r] = acc;
    switch (all_rows[r].sense) {
      case LpSense::LessEqual: slack_sign[r] = 1; break;
      case LpSense::GreaterEqual: slack_sign[r] = -1; break;
      case LpSense::Equal: slack_sign[r] = 0; break;
    }
  }

  std::vector<std::size_t> artificial_of(m, SIZE_MAX);
  std::size_t artificials = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const bool rhs_nonneg = rhs[r] >= 0.0;
    const int sign_after = rhs_nonneg ? slack_sign[r] : -slack_sign[r];
    if (sign_after != 1) {
      artificial_of[r] = artificials++;
    }
  }

  t.cols = structural + m + artificials;
  t.a.assign(t.rows * t.cols, 0.0);
  t.b.assign(m, 0.0);
  t.basis.assign(m, 0);
  t.active.assign(m, true);

  for (std::size_t r = 0; r < m; ++r) {
    const double row_mul = rhs[r] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double coeff = all_rows[r].coeffs[j] * row_mul;
      if (coeff == 0.0) continue;
      t.at(r, map[j].col) += coeff * map[j].sign;
      if (map[j].neg_col != SIZE_MAX) {
        t.at(r, map[j].neg_col) -= coeff;
      }
    }
    if (slack_sign[r] != 0) {
      t.at(r, structural + r) = slack_sign[r] * row_mul;
    }
    t.b[r] = rhs[r] * row_mul;
    if (artificial_of[r] != SIZE_MAX) {
      const std::size_t col = structural + m + artificial_of[r];
      t.at(r, col) = 1.0;
      t.basis[r] = col;
    } else {
      t.basis[r] = structural + r;
    }
  }

  std::vector<bool> allowed(t.cols, true);

  // Phase 1: drive the artificials to zero.
  if (artificials > 0) {
    std::vector<double> cost1(t.cols, 0.0);
    for (std::size_t c = structural + m; c < t.cols; ++c) cost1[c] = 1.0;
    if (!run_simplex(t, cost1, allowed, eps)) {
      // Phase-1 objective is bounded below by zero; treat as infeasible.
      return {LpStatus::Infeasible, {}, 0.0};
    }
    double phase1 = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (t.active[r] && t.basis[r] >= structural + m) phase1 += t.b[r];
    }
    if (phase1 > eps * 10.0) {
      return {LpStatus::Infeasible, {}, 0.0};
    }
    // Pivot leftover artificials out; rows that cannot pivot are
    // redundant and get deactivated.
    for (std::size_t r = 0; r < m; ++r) {
      if (!t.active[r] || t.basis[r] < structural + m) continue;
      std::size_t col = SIZE_MAX;
      for (std::size_t j = 0; j < structural + m; ++j) {
        if (std::abs(t.at(r, j)) > eps) {
          col = j;
          break;
        }
      }
      if (col == SIZE_MAX) {
        t.active[r] = false;
      } else {
        pivot(t, r, col);
      }
    }
    for (std::size_t c = structural + m; c < t.cols; ++c) allowed[c] = false;
  }

  // Phase 2: the real objective over standard columns.
  std::vector<double> cost2(t.cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost2[map[j].col] += problem.objective[j] * map[j].sign;
    if (map[j].neg_col != SIZE_MAX) {
      cost2[map[j].neg_col] -= problem.objective[j];
    }
  }
  if (!run_simplex(t, cost2, allowed, eps)) {
    return {LpStatus::Unbounded, {}, 0.0};
  }

  std::vector<double> std_values(t.cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.active[r]) std_values[t.basis[r]] = t.b[r];
  }

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double v = map[j].offset + map[j].sign * std_values[map[j].col];
    if (map[j].neg_col != SIZE_MAX) v -= std_values[map[j].neg_col];
    sol.values[j] = v;
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.objective += problem.objective[j] * sol.values[j];
  }
  return sol;
}

}  // namespace channelmesh
