#include "ccopf/polytope.hpp"

#include "ccopf/errors.hpp"

namespace ccopf {

std::string to_string(RowKind kind) {
  switch (kind) {
    case RowKind::angle_upper: return "angle-upper";
    case RowKind::angle_lower: return "angle-lower";
    case RowKind::injection_upper: return "injection-upper";
    case RowKind::injection_lower: return "injection-lower";
  }
  return "unknown";
}

bool FeasibilityPolytope::contains(const Eigen::VectorXd& p, double tol) const {
  return ((normals * p - offsets).array() <= tol).all();
}

FeasibilityPolytope build_polytope(const GridCase& grid, const GridMatrices& mat) {
  const auto n = static_cast<Eigen::Index>(grid.bus_count());
  if (mat.balance.rows() != n || mat.angle_sensitivity.rows() != static_cast<Eigen::Index>(grid.branch_count())) {
    throw ValidationError("grid matrices do not match the case dimensions");
  }

  std::vector<std::size_t> limited_branches;
  for (std::size_t k = 0; k < grid.branch_count(); ++k) {
    if (grid.branches[k].limited()) limited_branches.push_back(k);
  }
  std::vector<std::size_t> limited_buses;
  for (std::size_t i = 0; i < grid.bus_count(); ++i) {
    if (grid.buses[i].has_limits) limited_buses.push_back(i);
  }

  const auto rows = static_cast<Eigen::Index>(2 * limited_branches.size() + 2 * limited_buses.size());
  FeasibilityPolytope poly;
  poly.normals.resize(rows, n);
  poly.offsets.resize(rows);
  poly.labels.reserve(static_cast<std::size_t>(rows));

  Eigen::Index r = 0;
  for (double sign : {1.0, -1.0}) {
    const RowKind kind = sign > 0 ? RowKind::angle_upper : RowKind::angle_lower;
    for (std::size_t k : limited_branches) {
      poly.normals.row(r) = sign * mat.angle_sensitivity.row(static_cast<Eigen::Index>(k));
      poly.offsets(r) = grid.branches[k].angle_limit;
      poly.labels.push_back({kind, k});
      ++r;
    }
  }
  const double base = grid.base_mva;
  for (std::size_t i : limited_buses) {
    poly.normals.row(r) = mat.balance.row(static_cast<Eigen::Index>(i));
    poly.offsets(r) = grid.buses[i].p_max_mw / base;
    poly.labels.push_back({RowKind::injection_upper, i});
    ++r;
  }
  for (std::size_t i : limited_buses) {
    poly.normals.row(r) = -mat.balance.row(static_cast<Eigen::Index>(i));
    poly.offsets(r) = -grid.buses[i].p_min_mw / base;
    poly.labels.push_back({RowKind::injection_lower, i});
    ++r;
  }
  return poly;
}

}  // namespace ccopf
