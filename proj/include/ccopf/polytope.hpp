#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/grid_case.hpp"
#include "ccopf/grid_matrices.hpp"

namespace ccopf {

enum class RowKind { angle_upper, angle_lower, injection_upper, injection_lower };

struct RowLabel {
  RowKind kind = RowKind::angle_upper;
  // Branch index for angle rows, bus index for injection rows.
  std::size_t element = 0;
};

std::string to_string(RowKind kind);

// {p : W p <= b} over the full per-unit injection vector p.
struct FeasibilityPolytope {
  Eigen::MatrixXd normals;  // W, J x n
  Eigen::VectorXd offsets;  // b, J
  std::vector<RowLabel> labels;

  Eigen::Index rows() const { return normals.rows(); }
  Eigen::Index dim() const { return normals.cols(); }

  // True iff every row satisfies w_i^T p <= b_i + tol.
  bool contains(const Eigen::VectorXd& p, double tol = 0.0) const;
};

// Stacks angle-upper, angle-lower, injection-upper, injection-lower rows.
// Unlimited branches and buses without injection limits contribute no rows.
FeasibilityPolytope build_polytope(const GridCase& grid, const GridMatrices& mat);

}  // namespace ccopf
