#pragma once

#include <cstdint>
#include <random>

namespace ccopf {

// Seeded random stream. The engine is mt19937_64 and both transforms are
// implemented here, so a seed reproduces the same draws on every platform
// with the same libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Index in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Seed of sub-stream `stream` derived from `base` with splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ccopf
