#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/gaussian.hpp"
#include "ccopf/margins.hpp"
#include "ccopf/polytope.hpp"
#include "ccopf/rng.hpp"

namespace ccopf {

// Importance distribution D = sum_i alpha_i D_i, where D_i is N(0, Sigma)
// conditioned on the single half-space w_i^T xi >= Delta_i. Only stochastic
// rows take part; component c corresponds to polytope row rows[c].
struct MixtureSampler {
  std::vector<Eigen::Index> rows;
  Eigen::MatrixXd directions;          // phi_c = Sigma^{1/2} w / ||Sigma^{1/2} w||, one per row
  Eigen::MatrixXd reduced_directions;  // same direction in support coordinates
  Eigen::MatrixXd normals;             // w of each component
  Eigen::VectorXd delta;               // Delta of each component
  Eigen::VectorXd thresholds;          // beta
  Eigen::VectorXd tail_probs;          // Phi(-beta)
  Eigen::VectorXd weights;             // alpha, proportional to tail_probs
  double bound_m = 1.0;                // sum(tail_probs) / max(tail_probs)
  Eigen::MatrixXd sigma_half;
  GaussianSpec gaussian;

  Eigen::Index components() const { return static_cast<Eigen::Index>(rows.size()); }
  // Component of a polytope row, or -1 when the row is deterministic.
  Eigen::Index component_of(Eigen::Index row) const;

 private:
  friend MixtureSampler build_mixture(const FeasibilityPolytope&, const MarginSet&, const GaussianSpec&);
  friend std::pair<Eigen::VectorXd, Eigen::Index> sample_mixture(const MixtureSampler&, Rng&);
  std::vector<double> cumulative_;
  std::vector<Eigen::Index> row_to_component_;
};

// Throws ValidationError when no row is stochastic.
MixtureSampler build_mixture(const FeasibilityPolytope& poly, const MarginSet& m, const GaussianSpec& g);

// Exact draw from D_i for polytope row `row`: the standardized coordinate
// along phi is drawn by inverse survival transform on [beta, inf), the
// orthogonal part is an unconditioned normal.
Eigen::VectorXd sample_tail(const MixtureSampler& ms, Eigen::Index row, Rng& rng);

// Draws a component with probability alpha, then a tail sample; returns the
// scenario and the polytope row it was conditioned on. A single-component
// mixture draws no component index and matches sample_tail exactly.
std::pair<Eigen::VectorXd, Eigen::Index> sample_mixture(const MixtureSampler& ms, Rng& rng);

// q_D(xi) = sum_i alpha_i phi_Sigma(xi) / p_i over rows with w_i^T xi > Delta_i.
double mixture_pdf(const MixtureSampler& ms, const Eigen::VectorXd& xi);

}  // namespace ccopf
