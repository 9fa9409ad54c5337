#include "ccopf/sample_size.hpp"

#include <cmath>

#include "ccopf/errors.hpp"

namespace ccopf {

namespace {

void check_common(double delta, std::uint64_t dims) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (dims < 1) throw ParameterError("dimension must be at least 1");
}

std::uint64_t ceil_count(double value) {
  if (!std::isfinite(value)) throw ParameterError("sample-size bound is not finite");
  return value <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(value));
}

// Shared form: 2 s ln(1/delta)/eta + 2d + 2 d s ln(2 s/eta)/eta with s = M(1 - pi).
double bound(double eta, double delta, double dims, double scale) {
  return 2.0 * scale * std::log(1.0 / delta) / eta + 2.0 * dims +
         2.0 * dims * scale * std::log(2.0 * scale / eta) / eta;
}

}  // namespace

std::uint64_t sample_size_cc(double eps, double delta, std::uint64_t dims) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  check_common(delta, dims);
  return ceil_count(bound(eps, delta, static_cast<double>(dims), 1.0));
}

std::uint64_t sample_size_filtered(double eta, double delta, std::uint64_t dims, double pi) {
  return sample_size_is(eta, delta, dims, pi, 1.0);
}

std::uint64_t sample_size_is(double eta, double delta, std::uint64_t dims, double pi, double bound_m) {
  if (!(eta > 0.0 && eta <= 0.5)) throw ParameterError("eta must lie in (0, 1/2]");
  check_common(delta, dims);
  if (!(pi >= 0.0 && pi < 1.0)) throw ParameterError("pi must lie in [0, 1)");
  if (!(bound_m >= 1.0)) throw ParameterError("M must be at least 1");
  return ceil_count(bound(eta, delta, static_cast<double>(dims), bound_m * (1.0 - pi)));
}

}  // namespace ccopf
