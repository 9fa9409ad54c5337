#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/gaussian.hpp"
#include "ccopf/polytope.hpp"

namespace ccopf {

struct Confidence {
  double value = 0.0;
  double std_error = 0.0;  // binomial
};

// Fraction of n_test nominal draws xi with W (p + xi) <= b + 1e-9, p a full per-unit
// injection vector. Checked against the untightened polytope.
Confidence out_of_sample_confidence(const Eigen::VectorXd& injection, const FeasibilityPolytope& poly,
                                    const GaussianSpec& g, std::size_t n_test, std::uint64_t seed);

enum class SyntheticMethod { sa, sa_is };

struct SyntheticResult {
  double x_hat = 0.0;
  double oracle = 0.0;  // a - Phi^{-1}(1 - eta)
  double gap = 0.0;     // x_hat - oracle
};

// max x  s.t.  P(x + xi <= a) >= 1 - eta,  xi ~ N(0, 1), 0 < eta <= 1/2, solved by scenario
// approximation. For SA-IS the tightened bound defaults to the exact one,
// {x <= a - Phi^{-1}(1 - eta)}; `inner_bound` replaces it with {x <= b}.
SyntheticResult solve_1d_synthetic(double a, double eta, SyntheticMethod method, std::size_t count,
                                   std::uint64_t seed, std::optional<double> inner_bound = std::nullopt);

struct SweepPoint {
  double bound = 0.0;
  double feasibility_rate = 0.0;
  std::size_t scenarios = 0;
};

// SA-IS on the 1-D problem for every (b, N) pair; the rate is the fraction of
// seeds whose solution meets the chance constraint exactly.
std::vector<SweepPoint> sweep_1d(double a, double eta, const std::vector<double>& bounds,
                                 const std::vector<std::size_t>& counts, std::size_t seeds,
                                 std::uint64_t base_seed);

}  // namespace ccopf
