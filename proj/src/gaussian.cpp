#include "ccopf/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ccopf/errors.hpp"

namespace ccopf {

namespace {
constexpr double kRankCutoff = 1e-12;
}

GaussianSpec GaussianSpec::from_covariance(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols()) throw ValidationError("covariance must be square");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("covariance must be symmetric");
  }

  GaussianSpec g;
  g.covariance_ = covariance;
  const auto n = covariance.rows();
  if (n == 0) return g;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-10) throw ValidationError("covariance is not positive semidefinite");

  const double cutoff = kRankCutoff * std::max(lambda.maxCoeff(), 0.0);
  Eigen::VectorXd root = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda(i) > cutoff && lambda(i) > 0.0) {
      root(i) = std::sqrt(lambda(i));
      keep.push_back(i);
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  g.sqrt_ = v * root.asDiagonal() * v.transpose();
  g.sqrt_ = 0.5 * (g.sqrt_ + g.sqrt_.transpose()).eval();

  const auto k = static_cast<Eigen::Index>(keep.size());
  g.basis_.resize(n, k);
  g.variances_.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    g.basis_.col(j) = v.col(keep[static_cast<std::size_t>(j)]);
    g.variances_(j) = lambda(keep[static_cast<std::size_t>(j)]);
  }
  g.factor_ = g.basis_ * g.variances_.cwiseSqrt().asDiagonal();
  return g;
}

GaussianSpec GaussianSpec::from_stddev(const Eigen::VectorXd& stddev) {
  if ((stddev.array() < 0.0).any()) throw ValidationError("standard deviations must be nonnegative");
  // Diagonal case built directly so zero entries stay exactly zero.
  GaussianSpec g;
  const auto n = stddev.size();
  g.covariance_ = stddev.cwiseAbs2().asDiagonal();
  g.sqrt_ = stddev.asDiagonal();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (stddev(i) > 0.0) keep.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  g.basis_ = Eigen::MatrixXd::Zero(n, k);
  g.variances_.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = keep[static_cast<std::size_t>(j)];
    g.basis_(i, j) = 1.0;
    g.variances_(j) = stddev(i) * stddev(i);
  }
  g.factor_ = g.basis_ * g.variances_.cwiseSqrt().asDiagonal();
  return g;
}

double GaussianSpec::row_stddev(const Eigen::VectorXd& w) const { return (sqrt_ * w).norm(); }

bool GaussianSpec::is_deterministic(Eigen::Index i) const {
  return (covariance_.row(i).array() == 0.0).all() && (covariance_.col(i).array() == 0.0).all();
}

Eigen::VectorXd GaussianSpec::sample(Rng& rng) const {
  Eigen::VectorXd z(rank());
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
  return factor_ * z;
}

double GaussianSpec::log_pdf(const Eigen::VectorXd& xi) const {
  if (rank() == 0) throw NumericalError("density undefined for a zero covariance");
  const Eigen::VectorXd u = basis_.transpose() * xi;
  const double off_support = (xi - basis_ * u).norm();
  if (off_support > 1e-9 * std::max(1.0, xi.norm())) return -std::numeric_limits<double>::infinity();
  const double k = static_cast<double>(rank());
  return -0.5 * k * std::log(2.0 * std::numbers::pi) - 0.5 * variances_.array().log().sum() -
         0.5 * (u.array().square() / variances_.array()).sum();
}

double GaussianSpec::pdf(const Eigen::VectorXd& xi) const { return std::exp(log_pdf(xi)); }

}  // namespace ccopf
