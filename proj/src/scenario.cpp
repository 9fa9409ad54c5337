#include "ccopf/scenario.hpp"

#include "ccopf/errors.hpp"

namespace ccopf {

ScenarioSet draw_nominal(const GaussianSpec& g, std::size_t count, std::uint64_t seed) {
  ScenarioSet set;
  set.origin = ScenarioOrigin::nominal;
  set.seed = seed;
  set.scenarios.resize(static_cast<Eigen::Index>(count), g.dim());
  Rng rng(seed);
  for (Eigen::Index t = 0; t < set.size(); ++t) set.scenarios.row(t) = g.sample(rng).transpose();
  return set;
}

ScenarioSet draw_mixture(const MixtureSampler& ms, std::size_t count, std::uint64_t seed) {
  ScenarioSet set;
  set.origin = ScenarioOrigin::mixture;
  set.seed = seed;
  set.scenarios.resize(static_cast<Eigen::Index>(count), ms.gaussian.dim());
  set.components.reserve(count);
  Rng rng(seed);
  for (Eigen::Index t = 0; t < set.size(); ++t) {
    auto [xi, row] = sample_mixture(ms, rng);
    set.scenarios.row(t) = xi.transpose();
    set.components.push_back(row);
  }
  return set;
}

ScenarioSet draw_filtered(const GaussianSpec& g, const MarginSet& m, const FeasibilityPolytope& poly,
                          std::size_t count, std::uint64_t seed, std::size_t max_draws) {
  ScenarioSet set;
  set.origin = ScenarioOrigin::nominal;
  set.seed = seed;
  set.scenarios.resize(static_cast<Eigen::Index>(count), g.dim());
  Rng rng(seed);
  Eigen::Index kept = 0;
  std::size_t draws = 0;
  while (kept < set.size()) {
    if (draws++ >= max_draws) throw NumericalError("too few nominal draws fall outside the redundant region");
    Eigen::VectorXd xi = g.sample(rng);
    if (!contains_inner(m, poly, xi)) set.scenarios.row(kept++) = xi.transpose();
  }
  return set;
}

Eigen::VectorXd reduce_scenarios(const FeasibilityPolytope& poly, const ScenarioSet& scen) {
  if (scen.size() == 0) return poly.offsets;
  if (scen.scenarios.cols() != poly.dim()) throw ParameterError("scenario dimension does not match the polytope");
  const Eigen::MatrixXd proj = poly.normals * scen.scenarios.transpose();  // J x N
  return poly.offsets - proj.rowwise().maxCoeff();
}

OpfModel OpfModel::build(GridCase grid) {
  OpfModel model;
  model.grid = std::move(grid);
  model.matrices = build_matrices(model.grid);
  model.polytope = build_polytope(model.grid, model.matrices);

  const GridCase& g = model.grid;
  const std::size_t slack = g.slack_index();
  for (std::size_t k = 0; k < g.generators.size(); ++k) {
    if (!model.has_balancing_unit() && g.bus_index(g.generators[k].bus) == slack) {
      model.balancing = k;
    } else {
      model.dispatchable.push_back(k);
    }
  }

  const auto n = static_cast<Eigen::Index>(g.bus_count());
  const auto d = static_cast<Eigen::Index>(model.dispatchable.size());
  model.injection_map = Eigen::MatrixXd::Zero(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& gen = g.generators[model.dispatchable[static_cast<std::size_t>(j)]];
    model.injection_map(static_cast<Eigen::Index>(g.bus_index(gen.bus)), j) = 1.0 / g.base_mva;
  }
  model.fixed_injection.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    model.fixed_injection(i) = -g.buses[static_cast<std::size_t>(i)].load_mw / g.base_mva;
  }
  return model;
}

Eigen::VectorXd OpfModel::injection(const Eigen::VectorXd& setpoints) const {
  if (setpoints.size() != decision_dim()) throw ParameterError("setpoint vector has the wrong length");
  Eigen::VectorXd p = fixed_injection + injection_map * setpoints;
  // Slack entry carries the balancing injection so that sum(p) = 0.
  const auto s = static_cast<Eigen::Index>(grid.slack_index());
  p(s) = 0.0;
  p(s) = -p.sum();
  return p;
}

double OpfModel::balancing_output(const Eigen::VectorXd& setpoints) const {
  double total_load = 0.0;
  for (const auto& bus : grid.buses) total_load += bus.load_mw;
  double dispatched = 0.0;
  for (Eigen::Index j = 0; j < setpoints.size(); ++j) dispatched += setpoints(j);
  return total_load - dispatched;
}

LinearProgram assemble(const OpfModel& model, const ScenarioSet& scen, const FeasibilityPolytope* tightened) {
  const FeasibilityPolytope& poly = model.polytope;
  Eigen::VectorXd offsets = reduce_scenarios(poly, scen);
  if (tightened) {
    if (tightened->rows() != poly.rows()) throw ParameterError("tightened polytope does not match the model");
    offsets = offsets.cwiseMin(tightened->offsets);
  }

  const GridCase& g = model.grid;
  const Eigen::Index d = model.decision_dim();
  LinearProgram lp;
  lp.rows = poly.normals * model.injection_map;
  lp.rhs = offsets - poly.normals * model.fixed_injection;
  lp.lower.resize(d);
  lp.upper.resize(d);
  lp.cost.resize(d);

  const double balancing_cost = model.has_balancing_unit() ? g.generators[model.balancing].cost : 0.0;
  double total_load = 0.0;
  for (const auto& bus : g.buses) total_load += bus.load_mw;
  lp.cost_offset = model.has_balancing_unit() ? balancing_cost * total_load : 0.0;

  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& gen = g.generators[model.dispatchable[static_cast<std::size_t>(j)]];
    lp.lower(j) = gen.p_min_mw;
    lp.upper(j) = gen.p_max_mw;
    lp.cost(j) = gen.cost - balancing_cost;
  }
  lp.row_ids.resize(static_cast<std::size_t>(poly.rows()));
  for (Eigen::Index i = 0; i < poly.rows(); ++i) lp.row_ids[static_cast<std::size_t>(i)] = i;
  return lp;
}

DispatchSolution run_dc_opf(const OpfModel& model) {
  return solve(assemble(model, ScenarioSet{}));
}

DispatchSolution run_sa(const OpfModel& model, const GaussianSpec& g, double eta, std::size_t count,
                        std::uint64_t seed) {
  if (!(eta > 0.0 && eta <= 0.5)) throw ParameterError("eta must lie in (0, 1/2]");
  return solve(assemble(model, draw_nominal(g, count, seed)));
}

DispatchSolution run_sa_filtered(const OpfModel& model, const GaussianSpec& g, double eta,
                                 std::size_t count, std::uint64_t seed) {
  const MarginSet margins = compute_margins(model.polytope, g, eta);
  const FeasibilityPolytope tightened = tightened_polytope(model.polytope, margins);
  ScenarioSet scen;
  if (margins.stochastic_count() > 0) scen = draw_filtered(g, margins, model.polytope, count, seed);
  return solve(assemble(model, scen, &tightened));
}

DispatchSolution run_sa_is(const OpfModel& model, const GaussianSpec& g, double eta, std::size_t count,
                           std::uint64_t seed) {
  const MarginSet margins = compute_margins(model.polytope, g, eta);
  const FeasibilityPolytope tightened = tightened_polytope(model.polytope, margins);
  ScenarioSet scen;
  if (margins.stochastic_count() > 0 && count > 0) {
    scen = draw_mixture(build_mixture(model.polytope, margins, g), count, seed);
  }
  return solve(assemble(model, scen, &tightened));
}

}  // namespace ccopf
