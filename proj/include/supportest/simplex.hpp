#pragma once

// Dense two-phase primal simplex for small row counts:
//   maximize c^T x  subject to  A x = b,  x >= 0.
// Sized for LPs with a handful of rows and a few thousand columns.

#include <cstddef>
#include <vector>

namespace supportest {

struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Row-major, rows x cols.
  std::vector<double> A;
  std::vector<double> b;
  std::vector<double> c;

  double& at(std::size_t i, std::size_t j) { return A[i * cols + j]; }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

LpSolution solve_lp(const LinearProgram& lp, std::size_t max_iterations = 100000);

}  // namespace supportest
