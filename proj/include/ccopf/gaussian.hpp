#pragma once

#include <Eigen/Dense>

#include "ccopf/rng.hpp"

namespace ccopf {

// Zero-mean Gaussian fluctuation N(0, Sigma) of the injection vector. Sigma may
// be singular (slack and deterministic buses); sampling and densities work on
// the support subspace spanned by the eigenvectors with positive eigenvalues.
class GaussianSpec {
 public:
  GaussianSpec() = default;

  // Throws ValidationError if Sigma is not symmetric PSD (eigenvalues >= -1e-10).
  static GaussianSpec from_covariance(const Eigen::MatrixXd& covariance);
  static GaussianSpec from_stddev(const Eigen::VectorXd& stddev);

  Eigen::Index dim() const { return covariance_.rows(); }
  Eigen::Index rank() const { return basis_.cols(); }

  const Eigen::MatrixXd& covariance() const { return covariance_; }
  // Symmetric PSD square root Sigma^{1/2}.
  const Eigen::MatrixXd& sqrt() const { return sqrt_; }
  // Orthonormal basis U of the support (n x rank).
  const Eigen::MatrixXd& basis() const { return basis_; }
  // Positive eigenvalues matching the columns of basis().
  const Eigen::VectorXd& variances() const { return variances_; }
  // L = U diag(sqrt(variances)), so that xi = L z with z ~ N(0, I_rank).
  const Eigen::MatrixXd& factor() const { return factor_; }

  // ||Sigma^{1/2} w||_2, the standard deviation of w^T xi.
  double row_stddev(const Eigen::VectorXd& w) const;

  // True when row and column i are identically zero.
  bool is_deterministic(Eigen::Index i) const;

  Eigen::VectorXd sample(Rng& rng) const;

  // Density on the support subspace; zero for vectors with a component
  // outside it. Throws NumericalError when rank() == 0.
  double pdf(const Eigen::VectorXd& xi) const;
  double log_pdf(const Eigen::VectorXd& xi) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd sqrt_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd variances_;
  Eigen::MatrixXd factor_;
};

}  // namespace ccopf
