#pragma once

// Standard normal distribution functions built on the complementary error
// function. Tail values keep full relative precision out to |z| = 37.

namespace ccopf::margins {

double normal_pdf(double z);

// Phi(z).
double normal_cdf(double z);

// 1 - Phi(z) evaluated without cancellation.
double normal_survival(double z);

// Phi^{-1}(p) for p in [0, 1]; +-infinity at the endpoints.
double normal_quantile(double p);

// z such that 1 - Phi(z) == q. Accurate for tiny q where 1 - q rounds to 1.
double normal_survival_quantile(double q);

}  // namespace ccopf::margins
