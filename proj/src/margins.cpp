#include "ccopf/margins.hpp"

#include <cmath>
#include <limits>

#include "ccopf/errors.hpp"
#include "ccopf/normal.hpp"

namespace ccopf {

namespace {

// Row standard deviations with numerically-zero rows snapped to exactly zero.
Eigen::VectorXd row_stddevs(const FeasibilityPolytope& poly, const GaussianSpec& g) {
  if (g.dim() != poly.dim()) throw ValidationError("covariance dimension does not match the polytope");
  Eigen::VectorXd s = (poly.normals * g.sqrt()).rowwise().norm();
  const double scale = s.size() > 0 ? s.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= 1e-12 * scale) s(i) = 0.0;
  }
  return s;
}

}  // namespace

Eigen::Index MarginSet::stochastic_count() const {
  return (row_stddev.array() > 0.0).count();
}

MarginSet compute_margins(const FeasibilityPolytope& poly, const GaussianSpec& g, double eta) {
  if (!(eta > 0.0 && eta <= 0.5)) throw ParameterError("eta must lie in (0, 1/2]");
  MarginSet m;
  m.eta = eta;
  m.row_stddev = row_stddevs(poly, g);
  const double z = margins::normal_quantile(1.0 - eta);
  m.delta = m.row_stddev * z;
  m.beta.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.beta(i) = m.is_stochastic(i) ? z : std::numeric_limits<double>::infinity();
  }
  return m;
}

MarginSet margins_from_offsets(const FeasibilityPolytope& poly, const GaussianSpec& g,
                               const Eigen::VectorXd& delta, double eta) {
  if (delta.size() != poly.rows()) throw ParameterError("one margin per polytope row is required");
  if ((delta.array() < 0.0).any()) throw ParameterError("margins must be nonnegative");
  MarginSet m;
  m.eta = eta;
  m.row_stddev = row_stddevs(poly, g);
  m.delta = delta;
  m.beta.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.beta(i) = m.is_stochastic(i) ? delta(i) / m.row_stddev(i) : std::numeric_limits<double>::infinity();
  }
  return m;
}

FeasibilityPolytope tightened_polytope(const FeasibilityPolytope& poly, const MarginSet& m) {
  if (m.rows() != poly.rows()) throw ParameterError("margin set does not match the polytope");
  FeasibilityPolytope out = poly;
  out.offsets -= m.delta;
  return out;
}

bool contains_inner(const MarginSet& m, const FeasibilityPolytope& poly, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd excess = poly.normals * xi - m.delta;
  // Deterministic rows see only rounding noise.
  for (Eigen::Index i = 0; i < excess.size(); ++i) {
    if (m.is_stochastic(i) && excess(i) > 0.0) return false;
  }
  return true;
}

PiEstimate estimate_pi(const MarginSet& m, const FeasibilityPolytope& poly, const GaussianSpec& g,
                       PiMode mode, std::size_t n_samples, std::uint64_t seed) {
  PiEstimate est;
  if (mode == PiMode::union_bound) {
    double tail = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m.is_stochastic(i)) tail += margins::normal_cdf(-m.beta(i));
    }
    est.value = std::max(0.0, 1.0 - tail);
    est.lower_bound = true;
    return est;
  }
  if (n_samples == 0) throw ParameterError("monte-carlo estimate needs at least one sample");
  Rng rng(seed);
  std::size_t inside = 0;
  for (std::size_t t = 0; t < n_samples; ++t) {
    if (contains_inner(m, poly, g.sample(rng))) ++inside;
  }
  const double n = static_cast<double>(n_samples);
  est.value = static_cast<double>(inside) / n;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / n);
  return est;
}

}  // namespace ccopf
