#pragma once

#include <cstdint>

namespace viraltrace {

// splitmix64: 64-bit state, one multiply-xorshift finalizer per draw.
// The output stream is fixed by the algorithm, not by any standard-library
// implementation; sequential seeds give independent streams.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Smallest k with CDF(k) > u, i.e. inverse-CDF Poisson sampling from one
// uniform. Deterministic given (mean, u).
long long poisson_from_uniform(double mean, double u);

// Poisson conditioned on k >= 1; one uniform per draw.
long long zero_truncated_poisson_from_uniform(double mean, double u);

// Box-Muller pair; consumes two uniforms from the generator.
double gaussian(SplitMix64& rng);

}  // namespace viraltrace
