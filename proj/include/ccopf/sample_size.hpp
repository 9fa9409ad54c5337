#pragma once

#include <cstdint>

namespace ccopf {

// Scenario counts that make the scenario solution feasible for the chance
// constraint with confidence 1 - delta. `dims` is the number of controllable
// generators. All three return the exact ceiling of the bound.

// Calafiore-Campi: ceil(2/eps ln(1/delta) + 2d + 2d/eps ln(2/eps)).
std::uint64_t sample_size_cc(double eps, double delta, std::uint64_t dims);

// Scenarios drawn outside the redundant region of mass pi.
std::uint64_t sample_size_filtered(double eta, double delta, std::uint64_t dims, double pi);

// Scenarios drawn from the importance mixture with density-ratio bound M.
std::uint64_t sample_size_is(double eta, double delta, std::uint64_t dims, double pi, double bound_m);

}  // namespace ccopf
