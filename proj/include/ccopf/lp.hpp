#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccopf {

// min c^T x + offset  s.t.  rows * x <= rhs,  lower <= x <= upper.
// Bounds may be infinite.
struct LinearProgram {
  Eigen::VectorXd cost;
  double cost_offset = 0.0;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  // Optional caller identifiers for each row, reported back in active_rows.
  std::vector<Eigen::Index> row_ids;

  Eigen::Index variables() const { return cost.size(); }
  Eigen::Index constraints() const { return rows.rows(); }
};

enum class SolveStatus { optimal, infeasible, unbounded };

std::string to_string(SolveStatus status);

struct DispatchSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  // Identifiers (row_ids, or row positions) of rows tight at the optimum.
  std::vector<Eigen::Index> active_rows;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  // Zero selects a limit proportional to the problem size.
  std::size_t max_iterations = 0;
  std::size_t refactor_interval = 100;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_limit = 50;
};

// Dense bounded-variable revised simplex. Returns infeasible/unbounded as a
// status; throws NumericalError on iteration limit or a singular basis.
DispatchSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace ccopf
