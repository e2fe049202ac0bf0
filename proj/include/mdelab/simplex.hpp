#pragma once

// Revised primal simplex for small sparse linear programs
//
//   minimize c^T x  subject to  a_r^T x (= | <=) b_r,  x >= 0.
//
// The basis inverse is kept as a dense Eigen matrix and updated by
// elementary row operations, with a full refactorization every
// `refactor_interval` pivots. Phase one drives artificial variables to zero;
// phase two optimizes the real objective. Pricing is Dantzig's rule, switched
// to Bland's rule while pivots are degenerate.

#include <Eigen/Core>

#include <cstddef>
#include <utility>
#include <vector>

namespace mdelab {

enum class RowKind { Equal, LessEqual };

struct LinearProgram {
  /// columns[j] lists (row, coefficient) pairs of variable j.
  std::vector<std::vector<std::pair<int, double>>> columns;
  std::vector<double> cost;
  std::vector<double> rhs;
  std::vector<RowKind> kinds;

  int add_row(double b, RowKind kind) {
    rhs.push_back(b);
    kinds.push_back(kind);
    return static_cast<int>(rhs.size()) - 1;
  }
  int add_variable(double c, std::vector<std::pair<int, double>> entries) {
    cost.push_back(c);
    columns.push_back(std::move(entries));
    return static_cast<int>(cost.size()) - 1;
  }
  std::size_t variable_count() const { return cost.size(); }
  std::size_t row_count() const { return rhs.size(); }
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-10;
  double optimality_tolerance = 1e-11;
  std::size_t refactor_interval = 64;
  std::size_t max_iterations = 0;  // 0: derived from the problem size
};

/// Throws NumericalError when the program is infeasible, unbounded, or the
/// iteration limit is reached.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace mdelab
