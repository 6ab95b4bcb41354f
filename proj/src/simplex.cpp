#include "supportest/simplex.hpp"

#include <cmath>
#include <limits>

#include "supportest/error.hpp"

namespace supportest {

namespace {

using Real = long double;

constexpr Real kPivotTol = 1e-12L;
constexpr Real kCostTol = 1e-13L;
// Consecutive non-improving pivots before switching to Bland's rule.
constexpr std::size_t kStallLimit = 50;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0L) {}

  Real& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
  Real& rhs(std::size_t i) { return at(i, cols_); }
  // Row `rows_` holds reduced costs; its rhs entry is the objective value.
  Real& cost(std::size_t j) { return at(rows_, j); }

  void pivot(std::size_t pr, std::size_t pc) {
    const Real inv = 1.0L / at(pr, pc);
    for (std::size_t j = 0; j <= cols_; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0L;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == pr) continue;
      const Real f = at(i, pc);
      if (f == 0.0L) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(pr, j);
      at(i, pc) = 0.0L;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Real> t_;
};

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

// Maximizes the objective encoded in the cost row over columns [0, allowed).
PhaseResult run_phase(Tableau& t, std::vector<std::size_t>& basis, std::size_t rows, std::size_t allowed,
                      std::size_t& iterations, std::size_t max_iterations) {
  std::size_t stall = 0;
  Real last_objective = t.rhs(rows);
  while (iterations < max_iterations) {
    const bool bland = stall >= kStallLimit;
    std::size_t enter = allowed;
    Real best = -kCostTol;
    for (std::size_t j = 0; j < allowed; ++j) {
      const Real cj = t.cost(j);
      if (cj < best) {
        enter = j;
        if (bland) break;
        best = cj;
      }
    }
    if (enter == allowed) return PhaseResult::kOptimal;

    std::size_t leave = rows;
    Real best_ratio = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
      const Real a = t.at(i, enter);
      if (a <= kPivotTol) continue;
      const Real ratio = t.rhs(i) / a;
      if (ratio < best_ratio || (leave != rows && ratio == best_ratio && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == rows) return PhaseResult::kUnbounded;

    t.pivot(leave, enter);
    basis[leave] = enter;
    ++iterations;

    const Real objective = t.rhs(rows);
    stall = objective > last_objective + kCostTol * (1.0L + std::fabs(last_objective)) ? 0 : stall + 1;
    last_objective = objective;
  }
  return PhaseResult::kIterationLimit;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, std::size_t max_iterations) {
  const std::size_t m = lp.rows;
  const std::size_t n = lp.cols;
  if (lp.A.size() != m * n || lp.b.size() != m || lp.c.size() != n) {
    throw ParameterError("linear program dimensions are inconsistent");
  }

  // Columns: n structural variables, then m artificials.
  Tableau t(m, n + m);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Real sign = lp.b[i] < 0.0 ? -1.0L : 1.0L;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * lp.A[i * n + j];
    t.at(i, n + i) = 1.0L;
    t.rhs(i) = sign * lp.b[i];
    basis[i] = n + i;
  }

  // Phase 1: maximize -sum(artificials).
  for (std::size_t j = 0; j <= n + m; ++j) {
    if (j >= n && j < n + m) continue;
    Real s = 0.0L;
    for (std::size_t i = 0; i < m; ++i) s += t.at(i, j);
    t.at(m, j) = -s;
  }

  LpSolution sol;
  std::size_t iterations = 0;
  const PhaseResult p1 = run_phase(t, basis, m, n + m, iterations, max_iterations);
  sol.iterations = iterations;
  if (p1 == PhaseResult::kIterationLimit) {
    sol.status = LpStatus::kIterationLimit;
    return sol;
  }
  Real b_scale = 1.0L;
  for (double v : lp.b) b_scale += std::fabs(v);
  if (t.rhs(m) < -1e-10L * b_scale) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }

  // Pivot remaining zero-level artificials out of the basis where possible;
  // rows where this fails are redundant and keep their artificial at zero.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    std::size_t best = n;
    Real best_abs = kPivotTol;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(t.at(i, j)) > best_abs) {
        best_abs = std::fabs(t.at(i, j));
        best = j;
      }
    }
    if (best < n) {
      t.pivot(i, best);
      basis[i] = best;
    }
  }

  // Phase 2 cost row: -c_j + sum_i c_{B_i} T_ij.
  for (std::size_t j = 0; j <= n + m; ++j) t.at(m, j) = 0.0L;
  for (std::size_t j = 0; j < n; ++j) t.cost(j) = -static_cast<Real>(lp.c[j]);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) continue;
    const Real cb = lp.c[basis[i]];
    if (cb == 0.0L) continue;
    for (std::size_t j = 0; j <= n + m; ++j) t.at(m, j) += cb * t.at(i, j);
  }

  const PhaseResult p2 = run_phase(t, basis, m, n, iterations, max_iterations);
  sol.iterations = iterations;
  if (p2 == PhaseResult::kIterationLimit) {
    sol.status = LpStatus::kIterationLimit;
    return sol;
  }
  if (p2 == PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = static_cast<double>(t.rhs(i));
  }
  sol.objective = static_cast<double>(t.rhs(m));
  return sol;
}

}  // namespace supportest
