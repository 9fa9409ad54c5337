#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/gaussian.hpp"
#include "ccopf/grid_case.hpp"
#include "ccopf/grid_matrices.hpp"
#include "ccopf/lp.hpp"
#include "ccopf/margins.hpp"
#include "ccopf/polytope.hpp"
#include "ccopf/sampler.hpp"

namespace ccopf {

enum class ScenarioOrigin { nominal, mixture };

// N x n block of fluctuation realizations. N = 0 stands for the deterministic
// problem.
struct ScenarioSet {
  Eigen::MatrixXd scenarios;
  ScenarioOrigin origin = ScenarioOrigin::nominal;
  std::uint64_t seed = 0;
  // Conditioning row of every scenario; mixture origin only.
  std::vector<Eigen::Index> components;

  Eigen::Index size() const { return scenarios.rows(); }
};

ScenarioSet draw_nominal(const GaussianSpec& g, std::size_t count, std::uint64_t seed);
ScenarioSet draw_mixture(const MixtureSampler& ms, std::size_t count, std::uint64_t seed);

// Nominal draws with the redundant ones discarded, until `count` are kept.
// Throws NumericalError if `max_draws` nominal draws do not suffice.
ScenarioSet draw_filtered(const GaussianSpec& g, const MarginSet& m, const FeasibilityPolytope& poly,
                          std::size_t count, std::uint64_t seed, std::size_t max_draws = 10'000'000);

// r_i = b_i - max_t w_i^T xi^t. Since all scenario copies share W, {x : W x <= r}
// equals the intersection of {x : W (x + xi^t) <= b} over t.
Eigen::VectorXd reduce_scenarios(const FeasibilityPolytope& poly, const ScenarioSet& scen);

// Case plus everything needed to map generator setpoints to bus injections.
// Decision variables are the in-service generators except the balancing unit
// (the first generator on the slack bus), whose output follows from balance.
struct OpfModel {
  GridCase grid;
  GridMatrices matrices;
  FeasibilityPolytope polytope;
  std::vector<std::size_t> dispatchable;
  std::size_t balancing = std::numeric_limits<std::size_t>::max();
  Eigen::MatrixXd injection_map;    // n x d, p.u. injection per MW of setpoint
  Eigen::VectorXd fixed_injection;  // n, -Pd in p.u.

  static OpfModel build(GridCase grid);

  Eigen::Index decision_dim() const { return injection_map.cols(); }
  bool has_balancing_unit() const { return balancing != std::numeric_limits<std::size_t>::max(); }

  // Full per-unit injection vector for setpoints x_g (MW).
  Eigen::VectorXd injection(const Eigen::VectorXd& setpoints) const;
  // Output of the balancing unit (MW) implied by the setpoints.
  double balancing_output(const Eigen::VectorXd& setpoints) const;
};

// Scenario LP over the dispatchable setpoints. With `tightened` the rows of
// that polytope are imposed as well; they share W, so each row keeps the
// smaller of the two right-hand sides.
LinearProgram assemble(const OpfModel& model, const ScenarioSet& scen,
                       const FeasibilityPolytope* tightened = nullptr);

DispatchSolution run_dc_opf(const OpfModel& model);

// Plain scenario approximation with `count` nominal scenarios.
DispatchSolution run_sa(const OpfModel& model, const GaussianSpec& g, double eta, std::size_t count,
                        std::uint64_t seed);

// Tightened problem with nominal scenarios, redundant ones discarded.
DispatchSolution run_sa_filtered(const OpfModel& model, const GaussianSpec& g, double eta,
                                 std::size_t count, std::uint64_t seed);

// Tightened problem with scenarios from the importance mixture.
DispatchSolution run_sa_is(const OpfModel& model, const GaussianSpec& g, double eta, std::size_t count,
                           std::uint64_t seed);

}  // namespace ccopf
