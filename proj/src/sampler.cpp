#include "ccopf/sampler.hpp"

#include <algorithm>

#include "ccopf/errors.hpp"
#include "ccopf/normal.hpp"

namespace ccopf {

Eigen::Index MixtureSampler::component_of(Eigen::Index row) const {
  if (row < 0 || static_cast<std::size_t>(row) >= row_to_component_.size()) return -1;
  return row_to_component_[static_cast<std::size_t>(row)];
}

MixtureSampler build_mixture(const FeasibilityPolytope& poly, const MarginSet& m, const GaussianSpec& g) {
  if (m.rows() != poly.rows()) throw ParameterError("margin set does not match the polytope");
  MixtureSampler ms;
  ms.row_to_component_.assign(static_cast<std::size_t>(poly.rows()), -1);
  for (Eigen::Index i = 0; i < poly.rows(); ++i) {
    if (m.is_stochastic(i)) {
      ms.row_to_component_[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(ms.rows.size());
      ms.rows.push_back(i);
    }
  }
  if (ms.rows.empty()) throw ValidationError("every row is deterministic; nothing to sample");

  const Eigen::Index count = ms.components();
  const Eigen::Index n = poly.dim();
  ms.gaussian = g;
  ms.sigma_half = g.sqrt();
  ms.directions.resize(count, n);
  ms.reduced_directions.resize(count, g.rank());
  ms.normals.resize(count, n);
  ms.delta.resize(count);
  ms.thresholds.resize(count);
  ms.tail_probs.resize(count);

  for (Eigen::Index c = 0; c < count; ++c) {
    const Eigen::Index i = ms.rows[static_cast<std::size_t>(c)];
    const Eigen::VectorXd w = poly.normals.row(i).transpose();
    const double s = m.row_stddev(i);
    ms.normals.row(c) = w.transpose();
    ms.directions.row(c) = (g.sqrt() * w / s).transpose();
    ms.reduced_directions.row(c) = (g.factor().transpose() * w / s).transpose();
    ms.delta(c) = m.delta(i);
    ms.thresholds(c) = m.beta(i);
    ms.tail_probs(c) = margins::normal_survival(m.beta(i));
  }

  const double total = ms.tail_probs.sum();
  const double largest = ms.tail_probs.maxCoeff();
  if (!(largest > 0.0)) throw NumericalError("tail probabilities underflow; margins are too wide");
  ms.weights = ms.tail_probs / total;
  ms.bound_m = total / largest;

  ms.cumulative_.resize(static_cast<std::size_t>(count));
  double running = 0.0;
  for (Eigen::Index c = 0; c < count; ++c) {
    running += ms.weights(c);
    ms.cumulative_[static_cast<std::size_t>(c)] = running;
  }
  ms.cumulative_.back() = 1.0;
  return ms;
}

Eigen::VectorXd sample_tail(const MixtureSampler& ms, Eigen::Index row, Rng& rng) {
  const Eigen::Index c = ms.component_of(row);
  if (c < 0) throw ParameterError("sample_tail: row is not a stochastic row of the mixture");

  // Complementary form of the inverse transform: y = barPhi^{-1}(p u) stays
  // accurate when p = barPhi(beta) is tiny.
  const double u = rng.uniform();
  const double y = margins::normal_survival_quantile(ms.tail_probs(c) * u);

  const Eigen::Index k = ms.gaussian.rank();
  Eigen::VectorXd z(k);
  for (Eigen::Index j = 0; j < k; ++j) z(j) = rng.normal();
  const Eigen::VectorXd psi = ms.reduced_directions.row(c).transpose();
  const Eigen::VectorXd zeta = psi * y + z - psi * psi.dot(z);
  return ms.gaussian.factor() * zeta;
}

std::pair<Eigen::VectorXd, Eigen::Index> sample_mixture(const MixtureSampler& ms, Rng& rng) {
  if (ms.components() == 1) return {sample_tail(ms, ms.rows.front(), rng), ms.rows.front()};
  const double u = rng.uniform();
  const auto it = std::lower_bound(ms.cumulative_.begin(), ms.cumulative_.end(), u);
  const auto c = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - ms.cumulative_.begin(), static_cast<std::ptrdiff_t>(ms.cumulative_.size()) - 1));
  const Eigen::Index row = ms.rows[c];
  return {sample_tail(ms, row, rng), row};
}

double mixture_pdf(const MixtureSampler& ms, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd proj = ms.normals * xi;
  double ratio_sum = 0.0;
  for (Eigen::Index c = 0; c < ms.components(); ++c) {
    if (proj(c) > ms.delta(c)) ratio_sum += ms.weights(c) / ms.tail_probs(c);
  }
  if (ratio_sum == 0.0) return 0.0;
  return ratio_sum * ms.gaussian.pdf(xi);
}

}  // namespace ccopf
