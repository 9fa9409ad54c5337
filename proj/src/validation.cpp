#include "ccopf/validation.hpp"

#include <cmath>
#include <limits>

#include "ccopf/errors.hpp"
#include "ccopf/lp.hpp"
#include "ccopf/margins.hpp"
#include "ccopf/normal.hpp"
#include "ccopf/rng.hpp"
#include "ccopf/sampler.hpp"
#include "ccopf/scenario.hpp"

namespace ccopf {

Confidence out_of_sample_confidence(const Eigen::VectorXd& injection, const FeasibilityPolytope& poly,
                                    const GaussianSpec& g, std::size_t n_test, std::uint64_t seed) {
  if (n_test == 0) throw ParameterError("out-of-sample test needs at least one sample");
  if (injection.size() != poly.dim()) throw ParameterError("injection vector does not match the polytope");
  const Eigen::VectorXd slack = poly.offsets - poly.normals * injection;
  // Rows with no stochastic content never change their verdict.
  const Eigen::MatrixXd projected = poly.normals * g.factor();
  Rng rng(seed);
  Eigen::VectorXd z(g.rank());
  std::size_t feasible = 0;
  for (std::size_t t = 0; t < n_test; ++t) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
    if (((projected * z - slack).array() <= 1e-9).all()) ++feasible;
  }
  Confidence c;
  const double n = static_cast<double>(n_test);
  c.value = static_cast<double>(feasible) / n;
  c.std_error = std::sqrt(c.value * (1.0 - c.value) / n);
  return c;
}

SyntheticResult solve_1d_synthetic(double a, double eta, SyntheticMethod method, std::size_t count,
                                   std::uint64_t seed, std::optional<double> inner_bound) {
  if (!(eta > 0.0 && eta <= 0.5)) throw ParameterError("eta must lie in (0, 1/2]");

  FeasibilityPolytope poly;
  poly.normals = Eigen::MatrixXd::Ones(1, 1);
  poly.offsets = Eigen::VectorXd::Constant(1, a);
  poly.labels = {{RowKind::injection_upper, 0}};
  const GaussianSpec g = GaussianSpec::from_stddev(Eigen::VectorXd::Ones(1));

  LinearProgram lp;
  lp.cost = Eigen::VectorXd::Constant(1, -1.0);
  lp.rows = Eigen::MatrixXd::Ones(1, 1);
  lp.lower = Eigen::VectorXd::Constant(1, -std::numeric_limits<double>::infinity());
  lp.upper = Eigen::VectorXd::Constant(1, std::numeric_limits<double>::infinity());

  SyntheticResult out;
  out.oracle = a - margins::normal_quantile(1.0 - eta);

  if (method == SyntheticMethod::sa) {
    if (count == 0) throw ParameterError("plain SA on the 1-D problem needs at least one scenario");
    lp.rhs = reduce_scenarios(poly, draw_nominal(g, count, seed));
  } else {
    const MarginSet m = inner_bound
                            ? margins_from_offsets(poly, g, Eigen::VectorXd::Constant(1, a - *inner_bound), eta)
                            : compute_margins(poly, g, eta);
    const FeasibilityPolytope tightened = tightened_polytope(poly, m);
    Eigen::VectorXd rhs = tightened.offsets;
    if (count > 0) rhs = rhs.cwiseMin(reduce_scenarios(poly, draw_mixture(build_mixture(poly, m, g), count, seed)));
    lp.rhs = rhs;
  }

  const DispatchSolution sol = solve(lp);
  if (sol.status != SolveStatus::optimal) throw NumericalError("1-D scenario problem did not solve");
  out.x_hat = sol.x(0);
  out.gap = out.x_hat - out.oracle;
  return out;
}

std::vector<SweepPoint> sweep_1d(double a, double eta, const std::vector<double>& bounds,
                                 const std::vector<std::size_t>& counts, std::size_t seeds,
                                 std::uint64_t base_seed) {
  if (seeds == 0) throw ParameterError("sweep needs at least one seed");
  std::vector<SweepPoint> points;
  for (double b : bounds) {
    if (!(b < a)) throw ParameterError("inner bound b must be below a");
    for (std::size_t n : counts) {
      std::size_t feasible = 0;
      for (std::size_t s = 0; s < seeds; ++s) {
        const auto r = solve_1d_synthetic(a, eta, SyntheticMethod::sa_is, n, derive_seed(base_seed, s), b);
        // P(x + xi <= a) = Phi(a - x) >= 1 - eta.
        if (margins::normal_cdf(a - r.x_hat) >= 1.0 - eta) ++feasible;
      }
      points.push_back({b, static_cast<double>(feasible) / static_cast<double>(seeds), n});
    }
  }
  return points;
}

}  // namespace ccopf
