#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ccopf/gaussian.hpp"
#include "ccopf/polytope.hpp"

namespace ccopf {

// Per-row safety margins of a polytope under N(0, Sigma).
struct MarginSet {
  Eigen::VectorXd delta;       // Delta_i >= 0
  Eigen::VectorXd beta;        // Delta_i / ||Sigma^{1/2} w_i||, +inf on deterministic rows
  Eigen::VectorXd row_stddev;  // ||Sigma^{1/2} w_i||, exactly 0 on deterministic rows
  double eta = 0.5;

  Eigen::Index rows() const { return delta.size(); }
  bool is_stochastic(Eigen::Index i) const { return row_stddev(i) > 0.0; }
  Eigen::Index stochastic_count() const;
};

// Delta_i = ||Sigma^{1/2} w_i|| * Phi^{-1}(1 - eta). Requires 0 < eta <= 1/2.
MarginSet compute_margins(const FeasibilityPolytope& poly, const GaussianSpec& g, double eta);

// Margins with caller-chosen offsets (a custom inner region). eta is recorded
// as given and does not enter the computation.
MarginSet margins_from_offsets(const FeasibilityPolytope& poly, const GaussianSpec& g,
                               const Eigen::VectorXd& delta, double eta);

// Rows (w_i, b_i - Delta_i).
FeasibilityPolytope tightened_polytope(const FeasibilityPolytope& poly, const MarginSet& m);

// xi lies in the redundant-scenario region {xi : w_i^T xi <= Delta_i for all i}.
// Deterministic rows are skipped.
bool contains_inner(const MarginSet& m, const FeasibilityPolytope& poly, const Eigen::VectorXd& xi);

enum class PiMode { union_bound, monte_carlo };

struct PiEstimate {
  double value = 0.0;
  double std_error = 0.0;
  // True when `value` is a guaranteed lower bound on the true mass.
  bool lower_bound = false;
};

// Probability mass of the redundant-scenario region. Union-bound mode returns
// max(0, 1 - sum_i Phi(-beta_i)); Monte Carlo mode counts nominal draws.
PiEstimate estimate_pi(const MarginSet& m, const FeasibilityPolytope& poly, const GaussianSpec& g,
                       PiMode mode, std::size_t n_samples = 0, std::uint64_t seed = 0);

}  // namespace ccopf
