#include "ccopf/grid_matrices.hpp"

#include "ccopf/errors.hpp"

namespace ccopf {

GridMatrices build_matrices(const GridCase& grid) {
  const auto n = static_cast<Eigen::Index>(grid.bus_count());
  const auto m = static_cast<Eigen::Index>(grid.branch_count());
  const auto slack = static_cast<Eigen::Index>(grid.slack_index());

  GridMatrices out;
  out.laplacian = Eigen::MatrixXd::Zero(n, n);
  out.incidence = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& br = grid.branches[static_cast<std::size_t>(k)];
    const auto f = static_cast<Eigen::Index>(grid.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(grid.bus_index(br.to_bus));
    const double susceptance = 1.0 / br.reactance;
    out.laplacian(f, t) -= susceptance;
    out.laplacian(t, f) -= susceptance;
    out.laplacian(f, f) += susceptance;
    out.laplacian(t, t) += susceptance;
    out.incidence(k, f) = 1.0;
    out.incidence(k, t) = -1.0;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.laplacian);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of B did not converge");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cutoff = kPinvCutoff * lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(lambda(i)) > cutoff) inv(i) = 1.0 / lambda(i);
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  out.laplacian_pinv = v * inv.asDiagonal() * v.transpose();
  out.laplacian_pinv = 0.5 * (out.laplacian_pinv + out.laplacian_pinv.transpose()).eval();

  out.balance = Eigen::MatrixXd::Identity(n, n);
  out.balance.row(slack).setConstant(-1.0);
  out.balance(slack, slack) = 0.0;

  out.angle_sensitivity = out.incidence * out.laplacian_pinv * out.balance;
  return out;
}

}  // namespace ccopf
