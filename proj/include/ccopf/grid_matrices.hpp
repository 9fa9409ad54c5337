#pragma once

#include <Eigen/Dense>

#include "ccopf/grid_case.hpp"

namespace ccopf {

// Deterministic DC power-flow operators of a case, all in per-unit.
struct GridMatrices {
  Eigen::MatrixXd laplacian;      // B, n x n, rows sum to zero
  Eigen::MatrixXd laplacian_pinv; // B^+, symmetric
  Eigen::MatrixXd incidence;      // A, m x n, +1 at the from bus, -1 at the to bus
  Eigen::MatrixXd balance;        // C, slack row carries the balancing injection
  // Angle-difference sensitivities A B^+ C (m x n), the DC "PTDF in angle form".
  Eigen::MatrixXd angle_sensitivity;
};

// Eigenvalues below this fraction of the largest are treated as zero modes of B.
inline constexpr double kPinvCutoff = 1e-9;

GridMatrices build_matrices(const GridCase& grid);

}  // namespace ccopf
